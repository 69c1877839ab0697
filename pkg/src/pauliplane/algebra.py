"""Pointwise verification of operator identities on random probe spinors.

An identity A = B between composite operators is checked by applying both sides
to smooth random spinor functions whose jets are known exactly, so no finite
differences enter and relative residuals reach round-off level.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import itertools
import logging
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .catalog import FieldFamily, FieldParams, build_family
from .determining import FirstOrderOperator, ResidualReport, sample_points
from .enums import FamilyId, OperatorId, RelationId
from .failures import DomainError
from .hamiltonian import HamiltonianSpec
from .jet import RADIUS, X1, X2, Jet, as_points, multi_indices
from .operators import DifferentialOperator, SpinorOperator, as_operator
from .orm.records import ResidualRecord
from .spinor import ClosedFormSpinorFn

logger = logging.getLogger(__name__)

PROBE_DEGREE = 3

_BETA, _K1, _K2 = sympy.symbols("beta k1 k2", real=True)
_GAUSSIAN = sympy.exp(-_BETA * (X1 ** 2 + X2 ** 2) + sympy.I * (_K1 * X1 + _K2 * X2))


@lru_cache(maxsize=None)
def _gaussian_derivative(index: Tuple[int, int]):
    i, j = index
    expression = _GAUSSIAN
    if i:
        expression = sympy.diff(expression, X1, i)
    if j:
        expression = sympy.diff(expression, X2, j)
    return sympy.lambdify((X1, X2, _BETA, _K1, _K2), expression, modules="numpy")


def _falling(n: int, m: int) -> int:
    return factorial(n) // factorial(n - m) if m <= n else 0


class GaussianProbe(ClosedFormSpinorFn):
    """
    Probe spinor ψ_c(x) = p_c(x)·exp(-β|x|² + i k·x) with complex polynomials p_c of low degree.

    Jets of any order are exact.
    """

    def __init__(self, coefficients: np.ndarray, beta: float, wave: Tuple[float, float], name: str = "probe"):
        self.coefficients = np.asarray(coefficients, dtype=complex)
        self.exponents = [(i, total - i) for total in range(PROBE_DEGREE + 1) for i in range(total + 1)]
        if self.coefficients.shape != (2, len(self.exponents)):
            raise DomainError("Probe coefficients need shape (2, %d)" % len(self.exponents))
        self.beta = float(beta)
        self.wave = (float(wave[0]), float(wave[1]))
        super().__init__(value=lambda x1, x2: self.jet(x1, x2, 0).value,
                         gradient=lambda x1, x2: self._gradient_from_jet(x1, x2),
                         hessian=lambda x1, x2: self._hessian_from_jet(x1, x2), name=name)

    def _polynomial_jet(self, x1: np.ndarray, x2: np.ndarray, order: int) -> Jet:
        data = {}
        for m, n in multi_indices(order):
            total = np.zeros((2, x1.size), dtype=complex)
            for column, (i, j) in enumerate(self.exponents):
                factor = _falling(i, m) * _falling(j, n)
                if factor:
                    total += np.outer(self.coefficients[:, column], factor * x1 ** (i - m) * x2 ** (j - n))
            data[(m, n)] = total
        return Jet(data, order)

    def _gaussian_jet(self, x1: np.ndarray, x2: np.ndarray, order: int) -> Jet:
        return Jet({index: np.asarray(_gaussian_derivative(index)(x1, x2, self.beta, *self.wave), dtype=complex)
                    * np.ones_like(x1) for index in multi_indices(order)}, order)

    def jet(self, x1, x2, order: int) -> Jet:
        x1, x2, _ = as_points(x1, x2)
        return self._polynomial_jet(x1, x2, order).times(self._gaussian_jet(x1, x2, order))

    def _gradient_from_jet(self, x1, x2):
        jet = self.jet(x1, x2, 1)
        return np.stack([jet[(1, 0)], jet[(0, 1)]])

    def _hessian_from_jet(self, x1, x2):
        jet = self.jet(x1, x2, 2)
        return np.stack([np.stack([jet[(2, 0)], jet[(1, 1)]]), np.stack([jet[(1, 1)], jet[(0, 2)]])])


def random_probes(count: int, seed: int) -> List[GaussianProbe]:
    """Seeded probes with random spin mixing, widths and wave vectors."""
    rng = np.random.default_rng(seed)
    columns = (PROBE_DEGREE + 1) * (PROBE_DEGREE + 2) // 2
    probes = []
    for index in range(count):
        coefficients = rng.normal(size=(2, columns)) + 1j * rng.normal(size=(2, columns))
        probes.append(GaussianProbe(coefficients, rng.uniform(0.15, 0.35), tuple(rng.uniform(-1.0, 1.0, 2)),
                                    name="probe%d" % index))
    return probes


@dataclasses.dataclass(frozen=True)
class Identity:
    """One operator identity lhs = rhs."""
    label: str
    lhs: SpinorOperator
    rhs: SpinorOperator

    @property
    def order(self) -> int:
        return max(self.lhs.order, self.rhs.order)


@dataclasses.dataclass(frozen=True)
class RelationDefinition:
    """An algebraic relation: identities that must hold, plus the printed variant kept for comparison."""
    relation_id: RelationId
    family: FieldFamily
    statement: str
    identities: Tuple[Identity, ...]
    printed: Tuple[Identity, ...] = ()


def identity_residual(identity: Identity, probes: Sequence[ClosedFormSpinorFn], x1, x2,
                      jets: Optional[Dict[int, List[Jet]]] = None) -> np.ndarray:
    """
    Relative residual max|Lψ - Rψ| / max(|Lψ|, |Rψ|) per probe.

    ``jets`` maps a jet order to the probes' jets at these points; missing orders are computed and stored.
    """
    x1, x2, _ = as_points(x1, x2)
    if jets is None:
        jets = {}
    if identity.order not in jets:
        jets[identity.order] = [probe.jet(x1, x2, identity.order) for probe in probes]
    result = []
    for jet in jets[identity.order]:
        left = identity.lhs.apply_jet(jet, x1, x2).value
        right = identity.rhs.apply_jet(jet, x1, x2).value
        scale = max(np.max(np.abs(left)), np.max(np.abs(right)), np.finfo(float).tiny)
        result.append(float(np.max(np.abs(left - right)) / scale))
    return np.array(result)


def _commutes(label: str, a: SpinorOperator, b: SpinorOperator) -> Identity:
    return Identity(label, a * b, b * a)


def _ops(family: FieldFamily) -> Dict[OperatorId, SpinorOperator]:
    return {descriptor.operator_id: descriptor.operator.as_operator() for descriptor in family.operators}


def _hamiltonian(family: FieldFamily) -> DifferentialOperator:
    return HamiltonianSpec(family).as_operator()


def _line_hamiltonian(family: FieldFamily) -> SpinorOperator:
    """H - P2², the Hamiltonian acting on the x1 dependence once the conserved P2 is split off."""
    p2 = _ops(family)[OperatorId.P2]
    return _hamiltonian(family) - p2 ** 2


def _printed_q2() -> DifferentialOperator:
    return FirstOrderOperator(translation=((1, 0), (0, 0), (0, 0), (0, 0)), omega=(0, 0, 0, sympy.Rational(-1, 2)),
                              name="Q2 printed").as_operator()


def _relation_qr(relation: RelationId, params: FieldParams, lhs_params: FieldParams) -> RelationDefinition:
    family = build_family(FamilyId.T2_1, params)
    mutated = build_family(FamilyId.T2_1, lhs_params)
    ops, mutated_ops = _ops(family), _ops(mutated)
    h = _line_hamiltonian(family)
    q2, q3 = ops[OperatorId.Q2], ops[OperatorId.Q3]
    mu, nu = params.mu, params.nu
    if relation == RelationId.QR:
        identities = (Identity("Q3² = H - 2νQ2 + ν² + μ²", mutated_ops[OperatorId.Q3] ** 2,
                               h - 2 * nu * q2 + (nu ** 2 + mu ** 2)),
                      Identity("H = Q2² - Q3 - 1/4", _line_hamiltonian(mutated), q2 ** 2 - q3 - 0.25),
                      _commutes("[Q2, Q3] = 0", mutated_ops[OperatorId.Q2], mutated_ops[OperatorId.Q3]))
        printed = (Identity("Q3² = H + 2νQ2 + ν²", q3 ** 2, h + 2 * nu * _printed_q2() + nu ** 2),)
        statement = "Q3² = H - 2νQ2 + ν² + μ²"
    else:
        identities = (Identity("(Q3 + 1/2)² = (Q2 - ν)² + μ²", (mutated_ops[OperatorId.Q3] + 0.5) ** 2,
                               (q2 - nu) ** 2 + mu ** 2),)
        printed = (Identity("(Q3 - 1/2)² = (Q2 + ν)²", (q3 - 0.5) ** 2, (_printed_q2() + nu) ** 2),)
        statement = "(Q3 + 1/2)² = (Q2 - ν)² + μ²"
    return RelationDefinition(relation, family, statement, identities, printed)


def _relation_al(params: FieldParams, lhs_params: FieldParams) -> RelationDefinition:
    family = build_family(FamilyId.T2_2, params)
    mutated = _ops(build_family(FamilyId.T2_2, lhs_params))
    rotation = _ops(family)[OperatorId.Q1_TILDE]
    mu, nu = params.mu, params.nu
    rhs = rotation ** 2 - 2 * nu * rotation + (mu ** 2 + nu ** 2)
    identities = (Identity("Q4² = Q̃1² - 2νQ̃1 + μ² + ν²", mutated[OperatorId.Q4] ** 2, rhs),
                  _commutes("[Q̃1, Q4] = 0", mutated[OperatorId.Q1_TILDE], mutated[OperatorId.Q4]))
    printed = (Identity("Q4² = Q̃1² + 2νQ̃1 + μ² + ν²", _ops(family)[OperatorId.Q4] ** 2,
                        rotation ** 2 + 2 * nu * rotation + (mu ** 2 + nu ** 2)),)
    return RelationDefinition(RelationId.AL, family, "Q4² = Q̃1² - 2νQ̃1 + μ² + ν²", identities, printed)


def dilation_operator() -> DifferentialOperator:
    """D = ½(x·P + P·x) = x_aP_a - i."""
    return DifferentialOperator(momentum={0: (X1, X2)}, potential={0: -sympy.I}, name="D")


def conformal_operator(scale: float = 0.25) -> DifferentialOperator:
    """K = scale·r²; the conformal algebra closes for scale = 1/4."""
    return DifferentialOperator(potential={0: scale * RADIUS ** 2}, name="K")


def _relation_ca(params: FieldParams, mutation: float) -> RelationDefinition:
    family = build_family(FamilyId.T2_2, params)
    h = _hamiltonian(family)
    d = dilation_operator()
    k = conformal_operator(0.25)
    k_mutated = conformal_operator(0.25 * (1 + mutation))
    identities = (Identity("[H, D] = -2iH", h * d, d * h - 2j * h),
                  Identity("[K, D] = 2iK", k_mutated * d, d * k + 2j * k),
                  Identity("[K, H] = iD", k_mutated * h, h * k + 1j * d))
    printed_k = conformal_operator(0.5)
    printed = (Identity("[K, H] = iD with K = r²/2", printed_k * h, h * printed_k + 1j * d),)
    return RelationDefinition(RelationId.CA, family, "[H,D] = -2iH, [K,D] = 2iK, [K,H] = iD", identities, printed)


def _relation_sa3(relation: RelationId, params: FieldParams, lhs_params: FieldParams) -> RelationDefinition:
    family = build_family(FamilyId.T2_3, params)
    mutated_family = build_family(FamilyId.T2_3, lhs_params)
    ops, mutated = _ops(family), _ops(mutated_family)
    h = _hamiltonian(family)
    mu, nu = params.mu, params.nu
    total = h + mu * ops[OperatorId.Q1] + nu ** 2 / 4
    if relation == RelationId.SA3:
        identities = (Identity("Q5² = H + μQ1 + ν²/4", mutated[OperatorId.Q5] ** 2, total),
                      _commutes("[Q5, Ĥ] = 0", mutated[OperatorId.Q5], total),
                      _commutes("[Q1, Ĥ] = 0", mutated[OperatorId.Q1], total),
                      _commutes("[Q1, Q5] = 0", mutated[OperatorId.Q1], mutated[OperatorId.Q5]))
        printed = (Identity("Q5² = H + μQ1", ops[OperatorId.Q5] ** 2, h + mu * ops[OperatorId.Q1]),)
        statement = "Q5² = H + μQ1 + ν²/4 commuting with Q1 and Q5"
    else:
        identities = (_commutes("[H, Ĥ] = 0", _hamiltonian(mutated_family), total),)
        printed = ()
        statement = "[H, H + μQ1 + ν²/4] = 0"
    return RelationDefinition(relation, family, statement, identities, printed)


def _relation_sa1(relation: RelationId, params: FieldParams, lhs_params: FieldParams) -> RelationDefinition:
    family = build_family(FamilyId.T2_4, params)
    mutated_family = build_family(FamilyId.T2_4, lhs_params)
    ops, mutated = _ops(family), _ops(mutated_family)
    h = _hamiltonian(family)
    mu, nu, c = params.mu, params.nu, params.c
    total = h + (mu * ops[OperatorId.Q1] + nu) ** 2 + c
    if relation == RelationId.SA1:
        identities = (Identity("Q6² = H + (μQ1 + ν)² + c", mutated[OperatorId.Q6] ** 2, total),
                      _commutes("[Q6, 𝓗] = 0", mutated[OperatorId.Q6], total))
        statement = "Q6² = H + (μQ1 + ν)² + c"
    elif relation == RelationId.SA2:
        identities = (_commutes("[Q1, 𝓗] = 0", mutated[OperatorId.Q1], total),
                      _commutes("[Q1, Q6] = 0", mutated[OperatorId.Q1], mutated[OperatorId.Q6]))
        statement = "[Q1, 𝓗] = [Q1, Q6] = 0"
    else:
        identities = (_commutes("[H, 𝓗] = 0", _hamiltonian(mutated_family), total),)
        statement = "[H, H + (μQ1 + ν)² + c] = 0"
    return RelationDefinition(relation, family, statement, identities)


def relation_definition(relation: RelationId, params: FieldParams = FieldParams(),
                        mutation: float = 0.0) -> RelationDefinition:
    """
    Build a relation; ``mutation`` scales μ (K for the conformal algebra) on the left-hand sides only.
    """
    lhs_params = params.replace(mu=params.mu * (1 + mutation))
    if relation in (RelationId.QR, RelationId.QR2):
        return _relation_qr(relation, params, lhs_params)
    if relation == RelationId.AL:
        return _relation_al(params, lhs_params)
    if relation == RelationId.CA:
        return _relation_ca(params, mutation)
    if relation in (RelationId.SA3, RelationId.SA31):
        return _relation_sa3(relation, params, lhs_params)
    return _relation_sa1(relation, params, lhs_params)


RELATION_FAMILIES = {RelationId.QR: FamilyId.T2_1, RelationId.QR2: FamilyId.T2_1, RelationId.AL: FamilyId.T2_2,
                     RelationId.CA: FamilyId.T2_2, RelationId.SA3: FamilyId.T2_3, RelationId.SA31: FamilyId.T2_3,
                     RelationId.SA1: FamilyId.T2_4, RelationId.SA2: FamilyId.T2_4, RelationId.SA11: FamilyId.T2_4}


@dataclasses.dataclass
class RelationReport(ResidualReport):
    """Residual report of a relation, with the residual of the printed variant for comparison."""
    printed_residual: Optional[float] = None

    def to_json(self) -> Dict:
        result = super().to_json()
        result["printed_residual"] = self.printed_residual
        return result

    def to_sql(self) -> ResidualRecord:
        record = super().to_sql()
        record.printed_residual = self.printed_residual
        return record


def check_relation(relation: RelationId, params: FieldParams = FieldParams(), probe_count: int = 20,
                   point_count: int = 50, seed: int = 0, tolerance: float = 1e-8,
                   mutation: float = 0.0) -> RelationReport:
    """Evaluate every identity of a relation on seeded probes at seeded points of the family's domain."""
    definition = relation_definition(relation, params, mutation)
    family = definition.family
    x1, x2 = sample_points(seed, point_count, *family.sampling_annulus(), center=family.center)
    probes = random_probes(probe_count, seed)
    jets: Dict[int, List[Jet]] = {}
    details = {}
    residuals = []
    for identity in definition.identities:
        values = identity_residual(identity, probes, x1, x2, jets)
        details[identity.label] = float(np.max(values))
        residuals.append(values)
    residuals = np.concatenate(residuals)
    printed_residual = None
    if definition.printed:
        printed_residual = max(float(np.max(identity_residual(identity, probes, x1, x2, jets)))
                               for identity in definition.printed)
    report = RelationReport(family=family.name, subject=relation.value, kind="relation", seed=seed,
                            n_points=point_count, max_residual=float(np.max(residuals)),
                            mean_residual=float(np.mean(residuals)), tolerance=tolerance, details=details,
                            printed_residual=printed_residual)
    if not report.passed:
        logger.warning("Relation %s on %s fails: residual %.3e > %.1e" %
                       (relation.value, family.name, report.max_residual, tolerance))
    return report


def mutual_commutativity(family: FieldFamily, probe_count: int = 20, point_count: int = 50, seed: int = 0,
                         tolerance: float = 1e-8, with_hamiltonian: bool = True) -> Dict[Tuple[str, str], float]:
    """
    Relative residuals of [A, B] = 0 for all pairs of the family's operators (and H).
    """
    operators = [(descriptor.operator.name, descriptor.operator.as_operator()) for descriptor in family.operators]
    if with_hamiltonian:
        operators.append(("H", HamiltonianSpec.for_family(family).as_operator()))
    x1, x2 = sample_points(seed, point_count, *family.sampling_annulus(), center=family.center)
    probes = random_probes(probe_count, seed)
    jets: Dict[int, List[Jet]] = {}
    result = {}
    for (name_a, a), (name_b, b) in itertools.combinations(operators, 2):
        identity = _commutes("[%s, %s] = 0" % (name_a, name_b), a, b)
        result[(name_a, name_b)] = float(np.max(identity_residual(identity, probes, x1, x2, jets)))
        if result[(name_a, name_b)] > tolerance:
            logger.warning("[%s, %s] does not vanish on %s: %.3e" % (name_a, name_b, family.name,
                                                                      result[(name_a, name_b)]))
    return result


def commutes(a: SpinorOperator, b, probes: Sequence[ClosedFormSpinorFn], x1, x2) -> float:
    """Relative residual of [a, b] = 0 for arbitrary operators or numbers."""
    return float(np.max(identity_residual(_commutes("[a, b] = 0", a, as_operator(b)), probes, x1, x2)))
