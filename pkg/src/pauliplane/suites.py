"""Verification suites recorded in the check tree: catalog certification, relation checks and model spectra."""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Dict, List, Optional

import numpy as np

from .algebra import RELATION_FAMILIES, check_relation, mutual_commutativity
from .catalog import FieldFamily, FieldParams, SymmetryDescriptor, build_family, divergence
from .determining import ResidualReport, determining_report, sample_points
from .enums import FamilyId, ModelKind, RelationId
from .models import periodic, radial, susy
from .orm.records import SpectrumRecord
from .task import with_check

logger = logging.getLogger(__name__)

MUTATION_SIZE = 1e-3
DETECTION_THRESHOLD = 1e-5
DIVERGENCE_TOLERANCE = 1e-10

MUTATION_BLIND = (RelationId.SA2,)
"""Relations whose identities hold for every μ, so a μ mutation cannot be detected."""


@dataclasses.dataclass
class MutationReport(ResidualReport):
    """
    A relation evaluated with μ (or K) deliberately perturbed. It passes when the identities break while the
    unperturbed relation holds.
    """
    base_passed: bool = True

    @property
    def passed(self) -> bool:
        return bool(self.base_passed and np.isfinite(self.max_residual) and self.max_residual > self.tolerance)

    def to_json(self) -> Dict:
        result = super().to_json()
        result["base_pass"] = self.base_passed
        return result


@dataclasses.dataclass
class FamilyReport:
    """All checks of one catalog entry."""
    family: str
    note: str
    divergence_free: bool
    reports: List[ResidualReport]
    tolerance: float
    divergence_claim: bool = False

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def max_residual(self) -> float:
        residuals = [report.max_residual for report in self.reports if not isinstance(report, MutationReport)]
        return max(residuals, default=0.0)

    def to_json(self) -> Dict:
        return {"family": self.family, "note": self.note, "divergence_free": self.divergence_free,
                "divergence_claim": self.divergence_claim, "pass": self.passed, "max_residual": self.max_residual,
                "tolerance": self.tolerance,
                "reports": [report.to_json() for report in self.reports]}


@with_check
def verify_operator(family: FieldFamily, descriptor: SymmetryDescriptor, samples: int, seed: int,
                    tolerance: float) -> ResidualReport:
    """Determining equations of one operator at seeded interior points."""
    report = determining_report(family, descriptor.operator, seed, samples, tolerance,
                                annulus=family.sampling_annulus(), center=family.center,
                                potential=family.potential_expression(), family=family.name)
    report.details["lie_generator"] = float(descriptor.kind.name == "LIE")
    return report


@with_check
def verify_commutators(family: FieldFamily, probe_count: int, point_count: int, seed: int,
                       tolerance: float) -> List[ResidualReport]:
    """[H, Q] = 0 for every listed operator, applied to seeded analytic probes."""
    residuals = mutual_commutativity(family, probe_count, point_count, seed, tolerance)
    return [ResidualReport(family=family.name, subject="[%s, %s]" % pair, kind="commutator", seed=seed,
                           n_points=point_count, max_residual=value, mean_residual=value, tolerance=tolerance)
            for pair, value in sorted(residuals.items()) if "H" in pair]


@with_check
def verify_relation(relation: RelationId, params: FieldParams, probe_count: int, point_count: int, seed: int,
                    tolerance: float) -> ResidualReport:
    return check_relation(relation, params, probe_count, point_count, seed, tolerance)


@with_check
def mutation_control(relation: RelationId, params: FieldParams, probe_count: int, point_count: int, seed: int,
                     mutation: float = MUTATION_SIZE, threshold: float = DETECTION_THRESHOLD,
                     base: Optional[ResidualReport] = None) -> MutationReport:
    """
    Re-run a relation with a perturbed left-hand side; the residual must exceed ``threshold`` and the
    unperturbed relation ``base`` (evaluated here when not given) must hold.
    """
    if base is None:
        base = check_relation(relation, params, probe_count, point_count, seed)
    report = check_relation(relation, params, probe_count, point_count, seed, math.inf, mutation)
    result = MutationReport(family=report.family, subject=report.subject, kind="mutation", seed=seed,
                            n_points=point_count, max_residual=report.max_residual,
                            mean_residual=report.mean_residual, tolerance=threshold,
                            details={"mutation": mutation}, base_passed=base.passed)
    if not base.passed:
        logger.warning("Mutation control of %s is void: the unperturbed relation fails" % relation.value)
    elif not result.passed:
        logger.warning("Mutation of %s by %g went undetected: residual %.3e" % (relation.value, mutation,
                                                                                 report.max_residual))
    return result


def family_relations(family_id: FamilyId) -> List[RelationId]:
    """The relations checked on a catalog entry, in a fixed order."""
    return [relation for relation in RelationId if RELATION_FAMILIES.get(relation) == family_id]


def is_divergence_free(family: FieldFamily, samples: int = 50, seed: int = 0,
                       tolerance: float = DIVERGENCE_TOLERANCE) -> bool:
    x1, x2 = sample_points(seed, samples, *family.sampling_annulus(), center=family.center)
    return bool(np.max(np.abs(divergence(family, x1, x2))) <= tolerance)


@with_check
def verify_family(family_id: FamilyId, params: FieldParams = FieldParams(), samples: int = 200, seed: int = 0,
                  tolerance: float = 1e-8, probe_count: int = 20, point_count: int = 50,
                  mutation_controls: bool = True) -> FamilyReport:
    """
    Certify a catalog entry: determining equations of every operator, their commutators with H and,
    for the entries with higher symmetries, the algebraic relations with their mutation controls.
    """
    family = build_family(family_id, params)
    reports: List[ResidualReport] = [verify_operator(family, descriptor, samples, seed, tolerance)
                                     for descriptor in family.operators]
    reports.extend(verify_commutators(family, probe_count, point_count, seed, tolerance))
    for relation in family_relations(family_id):
        base = verify_relation(relation, params, probe_count, point_count, seed, tolerance)
        reports.append(base)
        if mutation_controls and relation not in MUTATION_BLIND:
            reports.append(mutation_control(relation, params, probe_count, point_count, seed, base=base))
    if family.note:
        logger.info("%s: %s" % (family.name, family.note))
    divergence_free = is_divergence_free(family, seed=seed)
    if family.divergence_free_claim and not divergence_free:
        logger.warning("%s is listed as divergence free but ∇·B does not vanish" % family.name)
    return FamilyReport(family.name, family.note, divergence_free, reports, tolerance, family.divergence_free_claim)


@dataclasses.dataclass
class SpectrumRow:
    """One level: closed form against the independent numerical value, if there is one."""
    label: str
    closed_form: float
    numeric: Optional[float]
    tolerance: float
    relative: bool = False

    @property
    def abs_err(self) -> Optional[float]:
        if self.numeric is None:
            return None
        return abs(self.numeric - self.closed_form)

    @property
    def rel_err(self) -> Optional[float]:
        if self.numeric is None:
            return None
        return self.abs_err / abs(self.closed_form) if self.closed_form else self.abs_err

    @property
    def max_residual(self) -> float:
        if self.numeric is None:
            return 0.0
        return self.rel_err if self.relative else self.abs_err

    @property
    def passed(self) -> bool:
        return self.numeric is None or self.max_residual <= self.tolerance

    def to_json(self) -> Dict:
        return {"n_or_k": self.label, "E_closed_form": self.closed_form, "E_numeric": self.numeric,
                "abs_err": self.abs_err, "rel_err": self.rel_err, "pass": self.passed}


@dataclasses.dataclass
class SpectrumTable:
    """Rows of one spectrum run together with the convergence monitor records."""
    model: ModelKind
    parameters: Dict[str, float]
    rows: List[SpectrumRow]
    convergence: List[Dict] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def max_residual(self) -> float:
        return max((row.max_residual for row in self.rows), default=0.0)

    @property
    def tolerance(self) -> Optional[float]:
        return self.rows[0].tolerance if self.rows else None

    def header(self) -> List[str]:
        return ["model"] + sorted(self.parameters) + ["n_or_k", "E_closed_form", "E_numeric", "abs_err", "rel_err"]

    def csv_rows(self) -> List[List]:
        parameters = [self.parameters[name] for name in sorted(self.parameters)]
        return [[self.model.value] + parameters + [row.label, row.closed_form, row.numeric, row.abs_err,
                                                   row.rel_err] for row in self.rows]

    def to_json(self) -> Dict:
        return {"model": self.model.value, "parameters": dict(sorted(self.parameters.items())),
                "pass": self.passed, "rows": [row.to_json() for row in self.rows]}

    def to_sql(self) -> List[SpectrumRecord]:
        return [SpectrumRecord(self.model.value, row.label, row.closed_form, row.numeric, row.abs_err, row.rel_err)
                for row in self.rows]


@with_check
def periodic_spectrum(mu: float, nu: float, n_max: int, omega: float = 1.0, cutoff: int = 64,
                      tolerance: float = 1e-6) -> SpectrumTable:
    """
    Discrete levels E = p² - k - ¼ + ω(μ² + ν²) against plane wave diagonalization in the
    quasimomentum and Q3 sector of each level.
    """
    convergence: List[Dict] = []
    sectors: Dict[float, List[periodic.SectorLevel]] = {}
    rows = []
    for level in periodic.discrete_levels(mu, n_max, nu, omega):
        seen = set()
        for p, q, energy in zip(level.momenta, level.quasimomenta, level.energies):
            if p in seen:
                continue
            seen.add(p)
            key = round(q, 12) % 1.0
            if key not in sectors:
                periodic.bloch_spectrum(mu, nu, key, cutoff, omega, convergence_log=convergence)
                sectors[key] = periodic.bloch_sectors(mu, nu, key, cutoff, omega, count=2 * (2 * cutoff + 1))
            candidates = [sector.energy for sector in sectors[key] if abs(sector.k - level.k) < 1e-6]
            numeric = min(candidates, key=lambda value: abs(value - energy)) if candidates else math.nan
            rows.append(SpectrumRow("n=%d eps=%+d p=%g" % (level.n, level.epsilon, p), energy, numeric, tolerance))
    return SpectrumTable(ModelKind.PERIODIC, {"mu": mu, "nu": nu, "omega": omega}, rows, convergence)


@with_check
def radial_spectrum(alpha: float, k: float, mu: float, epsilon: int, n_levels: int = 3, r_max: float = 60.0,
                    count: int = 6000, tolerance: float = 1e-4, max_growth: int = 3) -> SpectrumTable:
    """
    Coulomb-like levels against the Richardson extrapolated radial finite difference solver; the box
    starts at ``r_max`` and grows up to ``max_growth`` times while the levels still feel its wall.
    """
    closed = radial.coulomb_levels(alpha, k, mu, epsilon, n_levels - 1)
    convergence: List[Dict] = []
    numeric = radial.radial_fd_spectrum(alpha, k, mu, epsilon, r_max, count, n_levels, tolerance, max_growth,
                                        convergence_log=convergence)
    rows = [SpectrumRow("n=%d" % n, energy, float(value), tolerance, relative=True)
            for (n, energy), value in zip(closed, numeric.levels)]
    return SpectrumTable(ModelKind.RADIAL, {"alpha": alpha, "k": k, "mu": mu, "eps": epsilon}, rows, convergence)


@with_check
def susy_spectrum(kappa: float, p: float, lam: float, n_max: int, tolerance: float = 1e-4) -> SpectrumTable:
    """
    ε_n = -c_{κ+n} of the ladder against finite differences on the line. Only square integrable
    states have a numerical counterpart; the others are listed with the closed form alone.
    """
    levels = []
    for n in range(n_max + 1):
        if kappa + n == 0:
            logger.info("The ladder from κ = %g stops before κ + n = 0" % kappa)
            break
        levels.append(n)
    closed = {n: susy.closed_form_epsilon(kappa, p, n) for n in levels}
    bound = sorted(susy.normalizable_levels(kappa, p, n_max), key=closed.get)
    convergence: List[Dict] = []
    numeric: Dict[int, float] = {}
    if bound:
        values = susy.susy_fd_spectrum(kappa, p, lam, len(bound), convergence_log=convergence)
        numeric = {n: float(value) for n, value in zip(bound, values)}
    rows = [SpectrumRow("n=%d" % n, closed[n], numeric.get(n), tolerance, relative=True) for n in levels]
    return SpectrumTable(ModelKind.SUSY, {"kappa": kappa, "p": p, "lambda": lam}, rows, convergence)
