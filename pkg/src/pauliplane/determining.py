"""First order symmetry operators and the determining equations they must satisfy.

An operator Q = σ^μ(Λ^{μa}P_a + Ω^μ) with P_a = -i∂_a and
Λ^{μa} = C^μ ε^{ba}x_b + C^{μa} commutes with H = P² + σ·B (+ U) exactly when
the determining equations hold:

    ∂_bΛ^{μa} + ∂_aΛ^{μb} = 0,    ∂_aΩ⁰ = 0,    Λ^{kb}∂_bB^k = 0,
    Λ^{0b}∂_bB^d = 2(Ω×B)^d,     ∂_bΩ^d = ε^{dcm}B^cΛ^{mb},    Λ^{μa}∂_aU = 0.

With C^μ = 1 for μ = 0 the operator part is the angular momentum L = x1P2 - x2P1.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sqlalchemy.orm
import sympy

from .enums import Regime, SymmetryKind
from .failures import DomainError, InvalidRegimeError, MissingDerivativeError
from .jet import X1, X2, ExprJet, as_points
from .operators import DifferentialOperator
from .orm.base import RunMetaData
from .orm.records import ResidualRecord
from .spinor import EPSILON_2, EPSILON_3, PAULI, ClosedFormSpinorFn, Spinor

logger = logging.getLogger(__name__)

ZERO_TOLERANCE = 1e-12

CONSTANT_NAMES = ("C0", "C1", "C2", "C3") + tuple("C%d%d" % (mu, a) for mu in range(4) for a in (1, 2))
"""Names accepted by FirstOrderOperator.perturbed."""


@dataclasses.dataclass(frozen=True)
class ReducedConstants:
    """
    Constants of an operator in reduced form: a = -C⁰, b = -C³, c3 = C⁰¹, c4 = C⁰², c1 = C¹¹, c2 = C²²,
    d1 = C³¹, d2 = C³².
    """
    a: float = 0.0
    b: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    d1: float = 0.0
    d2: float = 0.0

    def to_json(self) -> Dict[str, float]:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class ConditionSet:
    """The condition set selecting which reduced determining system applies."""

    regime: Regime

    @classmethod
    def classify(cls, constants: ReducedConstants, tolerance: float = ZERO_TOLERANCE) -> ConditionSet:
        def zero(*values):
            return all(abs(v) <= tolerance for v in values)

        c = constants
        if not zero(c.a) and not zero(c.b) and zero(c.c3, c.c4):
            return cls(Regime.ROTATION_AND_SPIN)
        if zero(c.a) and not zero(c.b) and zero(c.d1, c.d2):
            return cls(Regime.SPIN_ROTATION)
        if not zero(c.a) and zero(c.b) and zero(c.c3, c.c4, c.d1, c.d2):
            return cls(Regime.ROTATION)
        if zero(c.a, c.b) and not zero(c.c1 ** 2 + c.c2 ** 2):
            return cls(Regime.SPIN_TRANSLATION)
        raise InvalidRegimeError("Constants %s satisfy none of the reduced condition sets" % (constants,))

    @property
    def description(self) -> str:
        return {Regime.ROTATION_AND_SPIN: "ab ≠ 0, c3 = c4 = 0",
                Regime.SPIN_ROTATION: "a = 0, b ≠ 0, d1 = d2 = 0",
                Regime.ROTATION: "a ≠ 0, b = 0, c3 = c4 = d1 = d2 = 0",
                Regime.SPIN_TRANSLATION: "a = b = 0, c1² + c2² ≠ 0"}[self.regime]


def _as_expressions(values: Sequence) -> Tuple[sympy.Expr, ...]:
    return tuple(sympy.sympify(v) for v in values)


@dataclasses.dataclass(frozen=True)
class FirstOrderOperator:
    """
    First order operator σ^μ(Λ^{μa}P_a + Ω^μ).

    :ivar rotation: The constants C^μ, μ = 0..3.
    :ivar translation: The constants C^{μa} as four pairs (C^{μ1}, C^{μ2}).
    :ivar omega: The four sympy expressions Ω^μ(x1, x2).
    """
    rotation: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    translation: Tuple[Tuple[float, float], ...] = ((0.0, 0.0),) * 4
    omega: Tuple[sympy.Expr, ...] = (sympy.S.Zero,) * 4
    name: str = "Q"

    def __post_init__(self):
        rotation = tuple(float(c) for c in self.rotation)
        translation = tuple(tuple(float(c) for c in pair) for pair in self.translation)
        omega = _as_expressions(self.omega)
        if len(rotation) != 4 or len(translation) != 4 or any(len(p) != 2 for p in translation) or len(omega) != 4:
            raise DomainError("An operator needs 4 constants C^μ, 4x2 constants C^{μa} and 4 functions Ω^μ")
        if not np.all(np.isfinite(rotation)) or not np.all(np.isfinite(translation)):
            raise DomainError("Operator constants of %s must be finite" % self.name)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)
        object.__setattr__(self, "omega", omega)

    @classmethod
    def from_constants(cls, name: str = "Q", a: float = 0.0, b: float = 0.0, c1: float = 0.0, c2: float = 0.0,
                       c3: float = 0.0, c4: float = 0.0, d1: float = 0.0, d2: float = 0.0,
                       omega: Sequence = (0, 0, 0, 0)) -> FirstOrderOperator:
        """Build an operator in reduced form from the constants a, b, c1..c4, d1, d2."""
        return cls(rotation=(-a, 0.0, 0.0, -b), translation=((c3, c4), (c1, 0.0), (0.0, c2), (d1, d2)),
                   omega=tuple(omega), name=name)

    def lambda_expressions(self) -> List[List[sympy.Expr]]:
        """Λ^{μa} as sympy expressions, indexed [μ][a]."""
        return [[-self.rotation[mu] * X2 + self.translation[mu][0], self.rotation[mu] * X1 + self.translation[mu][1]]
                for mu in range(4)]

    def lambda_values(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        """Λ^{μa}(x) with shape (4, 2, P)."""
        rotation = np.array(self.rotation)[:, None]
        translation = np.array(self.translation)
        return np.stack([-rotation * x2[None, :] + translation[:, 0:1],
                         rotation * x1[None, :] + translation[:, 1:2]], axis=1)

    def lambda_gradient(self) -> np.ndarray:
        """∂_bΛ^{μa} = C^μ ε^{ba}, shape (4, 2, 2) indexed [μ, a, b]."""
        return np.array(self.rotation)[:, None, None] * EPSILON_2.T[None, :, :]

    @cached_property
    def omega_jets(self) -> Tuple[ExprJet, ...]:
        return tuple(ExprJet(expression) for expression in self.omega)

    @cached_property
    def operator(self) -> DifferentialOperator:
        return DifferentialOperator(momentum={mu: coefficients for mu, coefficients in
                                              enumerate(self.lambda_expressions())},
                                    potential={mu: expression for mu, expression in enumerate(self.omega)},
                                    name=self.name)

    def as_operator(self) -> DifferentialOperator:
        return self.operator

    def reduced_constants(self) -> ReducedConstants:
        """
        The reduced constants of this operator.

        :raises InvalidRegimeError: If C¹, C², C¹² or C²¹ do not vanish.
        """
        leftovers = (self.rotation[1], self.rotation[2], self.translation[1][1], self.translation[2][0])
        if any(abs(value) > ZERO_TOLERANCE for value in leftovers):
            raise InvalidRegimeError("%s is not in reduced form (C¹, C², C¹², C²¹ = %s); apply an equivalence "
                                     "transformation first" % (self.name, leftovers))
        return ReducedConstants(a=-self.rotation[0], b=-self.rotation[3], c1=self.translation[1][0],
                                c2=self.translation[2][1], c3=self.translation[0][0], c4=self.translation[0][1],
                                d1=self.translation[3][0], d2=self.translation[3][1])

    def perturbed(self, constant: str, delta: float) -> FirstOrderOperator:
        """A copy with one constant (named like ``"C3"`` or ``"C31"``) shifted by delta."""
        if constant not in CONSTANT_NAMES:
            raise DomainError("Unknown operator constant %s, expected one of %s" % (constant, CONSTANT_NAMES))
        rotation = list(self.rotation)
        translation = [list(pair) for pair in self.translation]
        if len(constant) == 2:
            rotation[int(constant[1])] += delta
        else:
            translation[int(constant[1])][int(constant[2]) - 1] += delta
        return dataclasses.replace(self, rotation=tuple(rotation),
                                   translation=tuple(tuple(pair) for pair in translation),
                                   name="%s[%s%+g]" % (self.name, constant, delta))

    def __str__(self):
        return self.name


class NumericField:
    """
    Magnetic field given by a plain callable; the Jacobian falls back to central differences.

    :param function: Maps coordinate arrays (P,) to field values (3, P).
    :param jacobian: Optional analytic Jacobian with shape (3, 2, P), indexed [k, b] = ∂_bB^k.
    """

    step = 1e-4

    def __init__(self, function: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 jacobian: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None, name: str = "B"):
        self.function = function
        self._jacobian = jacobian
        self.name = name

    def check_domain(self, x1, x2):
        values = np.asarray(self.function(x1, x2), dtype=float)
        if not np.all(np.isfinite(values)):
            raise DomainError("Field %s is not finite at some of the requested points" % self.name)

    def value(self, x1, x2) -> np.ndarray:
        x1, x2, _ = as_points(x1, x2)
        return np.asarray(self.function(x1, x2), dtype=float).reshape(3, -1)

    def jacobian(self, x1, x2) -> np.ndarray:
        x1, x2, _ = as_points(x1, x2)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(x1, x2), dtype=float).reshape(3, 2, -1)
        h = self.step
        columns = []
        for shift in ((h, 0.0), (0.0, h)):
            forward = (-self.value(x1 + 2 * shift[0], x2 + 2 * shift[1])
                       + 8 * self.value(x1 + shift[0], x2 + shift[1])
                       - 8 * self.value(x1 - shift[0], x2 - shift[1])
                       + self.value(x1 - 2 * shift[0], x2 - 2 * shift[1]))
            columns.append(forward / (12 * h))
        return np.stack(columns, axis=1)


@dataclasses.dataclass
class DeterminingResidual:
    """Pointwise residuals of every determining equation."""

    killing: np.ndarray
    """∂_bΛ^{μa} + ∂_aΛ^{μb}, shape (4, 2, 2, P)."""
    omega0_gradient: np.ndarray
    """∂_aΩ⁰, shape (2, P)."""
    spin_trace: np.ndarray
    """Λ^{kb}∂_bB^k, shape (P,)."""
    spin_transport: np.ndarray
    """Λ^{0b}∂_bB^d - 2(Ω×B)^d, shape (3, P)."""
    omega_gradient: np.ndarray
    """∂_bΩ^d - ε^{dcm}B^cΛ^{mb}, shape (3, 2, P)."""
    omega_laplacian: np.ndarray
    """-ΔΩ^d - ε^{mkd}Λ^{ma}∂_aB^k, shape (3, P)."""
    potential: Optional[np.ndarray] = None
    """Λ^{μa}∂_aU, shape (4, P), present when a scalar potential was given."""

    def components(self) -> Dict[str, np.ndarray]:
        result = {"killing": self.killing, "omega0_gradient": self.omega0_gradient, "spin_trace": self.spin_trace,
                  "spin_transport": self.spin_transport, "omega_gradient": self.omega_gradient,
                  "omega_laplacian": self.omega_laplacian}
        if self.potential is not None:
            result["potential"] = self.potential
        return result

    def pointwise_max(self) -> np.ndarray:
        """Largest absolute residual at every point."""
        maxima = [np.max(np.abs(value).reshape(-1, value.shape[-1]), axis=0)
                  for value in self.components().values()]
        return np.max(np.stack(maxima), axis=0)

    def max_abs(self) -> float:
        return float(np.max(self.pointwise_max()))

    def summary(self) -> Dict[str, float]:
        return {name: float(np.max(np.abs(value))) for name, value in self.components().items()}


def residual_de(field, operator: FirstOrderOperator, x1, x2, potential: Optional[sympy.Expr] = None) \
        -> DeterminingResidual:
    """
    Evaluate the determining equations of ``operator`` for ``field`` at a batch of points.

    :param field: Anything with ``value``, ``jacobian`` and ``check_domain``, e.g. a catalog FieldFamily.
    :param operator: The candidate symmetry.
    :param potential: Optional scalar potential U = ω|B|² + V as a sympy expression.
    """
    x1, x2, _ = as_points(x1, x2)
    field.check_domain(x1, x2)
    b = field.value(x1, x2)
    db = field.jacobian(x1, x2)
    lam = operator.lambda_values(x1, x2)
    dlam = operator.lambda_gradient()
    points = x1.size

    killing = np.broadcast_to((dlam + np.swapaxes(dlam, 1, 2))[..., None], (4, 2, 2, points)).copy()
    omega = [jet(x1, x2, 2) for jet in operator.omega_jets]
    omega_values = np.stack([omega[d][(0, 0)] for d in range(1, 4)])
    omega_gradients = np.stack([np.stack([omega[d][(1, 0)], omega[d][(0, 1)]]) for d in range(1, 4)])
    omega_laplacians = np.stack([omega[d][(2, 0)] + omega[d][(0, 2)] for d in range(1, 4)])

    omega0_gradient = np.stack([omega[0][(1, 0)], omega[0][(0, 1)]])
    spin_trace = np.einsum("kbp,kbp->p", lam[1:], db)
    spin_transport = np.einsum("bp,dbp->dp", lam[0], db) - 2 * np.cross(omega_values, b, axis=0)
    omega_gradient = omega_gradients - np.einsum("dcm,cp,mbp->dbp", EPSILON_3, b, lam[1:])
    omega_laplacian = -omega_laplacians - np.einsum("mkd,map,kap->dp", EPSILON_3, lam[1:], db)

    potential_residual = None
    if potential is not None:
        jet = ExprJet(potential)(x1, x2, 1)
        potential_residual = lam[:, 0] * jet[(1, 0)] + lam[:, 1] * jet[(0, 1)]

    return DeterminingResidual(killing, omega0_gradient, spin_trace, spin_transport, omega_gradient,
                               omega_laplacian, potential_residual)


E1_LABELS = ("omega3_x1", "omega3_x2", "omega1_x1", "omega1_x2", "omega2_x1", "omega2_x2", "trace",
             "transport1", "transport2", "transport3")


@dataclasses.dataclass
class E1Residual:
    """Pointwise residuals of the reduced determining system, shape (10, P)."""

    components: np.ndarray
    condition_set: ConditionSet
    labels: Tuple[str, ...] = E1_LABELS

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))

    def summary(self) -> Dict[str, float]:
        return {label: float(np.max(np.abs(row))) for label, row in zip(self.labels, self.components)}


def residual_e1(field, omega: Sequence[sympy.Expr], constants: ReducedConstants, x1, x2) -> E1Residual:
    """
    Evaluate the reduced determining system for spin functions ``omega`` = (Ω¹, Ω², Ω³).

    :raises InvalidRegimeError: If the constants fit none of the condition sets.
    """
    condition_set = ConditionSet.classify(constants)
    x1, x2, _ = as_points(x1, x2)
    field.check_domain(x1, x2)
    b1, b2, b3 = field.value(x1, x2)
    db = field.jacobian(x1, x2)
    jets = [ExprJet(expression)(x1, x2, 1) for expression in omega]
    w = np.stack([jet[(0, 0)] for jet in jets])
    dw = [(jet[(1, 0)], jet[(0, 1)]) for jet in jets]
    c = constants
    shear_1 = c.b * x2 + c.d1
    shear_2 = -c.b * x1 + c.d2
    drift_1 = c.a * x2 + c.c3
    drift_2 = -c.a * x1 + c.c4
    cross = np.cross(w, np.stack([b1, b2, b3]), axis=0)
    rows = [dw[2][0] + c.c1 * b2,
            dw[2][1] - c.c2 * b1,
            dw[0][0] - shear_1 * b2,
            dw[0][1] - shear_2 * b2 + c.c2 * b3,
            dw[1][0] - c.c1 * b3 + shear_1 * b1,
            dw[1][1] + shear_2 * b1,
            c.c1 * db[0, 0] + c.c2 * db[1, 1] + shear_1 * db[2, 0] + shear_2 * db[2, 1]]
    rows += [drift_1 * db[d, 0] + drift_2 * db[d, 1] - 2 * cross[d] for d in range(3)]
    return E1Residual(np.stack([np.asarray(row, dtype=complex) for row in rows]), condition_set)


def lie_reduction_check(operator: FirstOrderOperator) -> SymmetryKind:
    """
    Classify an operator as Lie generator or higher symmetry.

    The operator is a Lie generator when only its μ = 0 part carries derivatives,
    Ω¹ and Ω² vanish identically and Ω⁰, Ω³ are constant.
    """
    spin_derivatives = any(abs(operator.rotation[k]) > ZERO_TOLERANCE or
                           any(abs(c) > ZERO_TOLERANCE for c in operator.translation[k]) for k in range(1, 4))
    if spin_derivatives:
        return SymmetryKind.HIGHER
    if any(sympy.simplify(operator.omega[k]) != 0 for k in (1, 2)):
        return SymmetryKind.HIGHER
    if operator.omega[0].free_symbols or operator.omega[3].free_symbols:
        return SymmetryKind.HIGHER
    return SymmetryKind.LIE


def apply_operator(operator: FirstOrderOperator, psi: ClosedFormSpinorFn, x1, x2):
    """
    Evaluate (Qψ)(x).

    :return: A Spinor for a single point, otherwise an array of shape (2, P).
    """
    x1, x2, scalar = as_points(x1, x2)
    value = psi(x1, x2)
    try:
        gradient = psi.gradient(x1, x2)
    except DomainError as e:
        raise MissingDerivativeError("No gradient of %s available at the requested points: %s" % (psi.name, e))
    lam = operator.lambda_values(x1, x2)
    result = np.zeros_like(value)
    for mu in range(4):
        inner = -1j * (lam[mu, 0] * gradient[0] + lam[mu, 1] * gradient[1])
        inner = inner + operator.omega_jets[mu].evaluate(x1, x2) * value
        result += PAULI[mu] @ inner
    if scalar:
        return Spinor.from_array(result[:, 0])
    return result


def sample_points(seed: int, count: int, r_min: float = 0.2, r_max: float = 3.0,
                  center: Tuple[float, float] = (0.0, 0.0)) -> Tuple[np.ndarray, np.ndarray]:
    """Seeded points, uniform by area in the annulus r_min ≤ |x - center| ≤ r_max."""
    if not 0 <= r_min < r_max:
        raise DomainError("Sampling annulus needs 0 ≤ r_min < r_max, got %g, %g" % (r_min, r_max))
    rng = np.random.default_rng(seed)
    radius = np.sqrt(rng.uniform(r_min ** 2, r_max ** 2, count))
    angle = rng.uniform(0.0, 2 * np.pi, count)
    return center[0] + radius * np.cos(angle), center[1] + radius * np.sin(angle)


@dataclasses.dataclass
class ResidualReport:
    """Outcome of one residual suite, serialized into reports and the database."""

    family: str
    subject: str
    kind: str
    seed: Optional[int]
    n_points: int
    max_residual: float
    mean_residual: float
    tolerance: float
    details: Dict[str, float] = dataclasses.field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tolerance)

    def to_json(self) -> Dict:
        return {"family": self.family, "subject": self.subject, "kind": self.kind, "seed": self.seed,
                "n_points": self.n_points, "max_residual": self.max_residual,
                "mean_residual": self.mean_residual, "tolerance": self.tolerance, "pass": self.passed,
                "details": dict(sorted(self.details.items()))}

    def to_sql(self) -> ResidualRecord:
        return ResidualRecord(self.family, self.subject, self.kind, self.seed, self.n_points, self.max_residual,
                              self.mean_residual, self.tolerance, self.passed)

    def insert(self, session: sqlalchemy.orm.Session) -> ResidualRecord:
        """Insert this report, linked to the current run metadata."""
        record = self.to_sql()
        record.run_metadata_id = RunMetaData().insert(session).id
        session.add(record)
        session.commit()
        return record


def determining_report(field, operator: FirstOrderOperator, seed: int, count: int, tolerance: float,
                       annulus: Tuple[float, float] = (0.2, 3.0), center: Tuple[float, float] = (0.0, 0.0),
                       potential: Optional[sympy.Expr] = None, family: str = "") -> ResidualReport:
    """Run residual_de on seeded sample points and condense the result."""
    x1, x2 = sample_points(seed, count, annulus[0], annulus[1], center)
    residual = residual_de(field, operator, x1, x2, potential)
    pointwise = residual.pointwise_max()
    report = ResidualReport(family=family, subject=operator.name, kind="determining", seed=seed, n_points=count,
                            max_residual=float(np.max(pointwise)), mean_residual=float(np.mean(pointwise)),
                            tolerance=tolerance, details=residual.summary())
    if not report.passed:
        logger.warning("Determining equations of %s on %s fail: residual %.3e > %.1e" %
                       (operator.name, family, report.max_residual, tolerance))
    return report
