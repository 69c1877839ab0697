"""Pauli Hamiltonians H = -∇² + σ·B + ω|B|² + V, their action on spinor functions and finite difference forms."""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
import sympy

from .catalog import FieldFamily
from .determining import FirstOrderOperator
from .enums import Boundary
from .failures import DomainError
from .jet import ExprJet, as_points
from .operators import DifferentialOperator
from .spinor import PAULI, ClosedFormSpinorFn, Spinor, sigma_dot

logger = logging.getLogger(__name__)

DENSE_LIMIT = 4096
"""Largest matrix dimension handled by dense diagonalization."""


@dataclasses.dataclass(frozen=True)
class HamiltonianSpec:
    """
    The Hamiltonian -∇² + σ·B(x) + ω|B(x)|² + V(x).

    :ivar field: The magnetic field.
    :ivar omega: Weight of the |B|² term.
    :ivar potential: Optional scalar potential V as a sympy expression in x1, x2.
    """
    field: FieldFamily
    omega: float = 0.0
    potential: Optional[sympy.Expr] = None

    @classmethod
    def for_family(cls, field: FieldFamily, omega: Optional[float] = None,
                   with_potential: bool = True) -> HamiltonianSpec:
        """Use the family's ω and its compatible potential slot."""
        potential = field.potential_expression() if with_potential else None
        return cls(field, field.params.omega if omega is None else omega, potential)

    def scalar_potential(self) -> sympy.Expr:
        """U = ω|B|² + V."""
        result = self.omega * sum(component ** 2 for component in self.field.components)
        if self.potential is not None:
            result = result + self.potential
        return sympy.sympify(result)

    @cached_property
    def operator(self) -> DifferentialOperator:
        b1, b2, b3 = self.field.components
        return DifferentialOperator(laplacian=1, potential={0: self.scalar_potential(), 1: b1, 2: b2, 3: b3},
                                    name="H")

    def as_operator(self) -> DifferentialOperator:
        return self.operator

    @cached_property
    def _potential_jet(self) -> ExprJet:
        return ExprJet(self.scalar_potential())


@dataclasses.dataclass(frozen=True)
class Grid:
    """
    Uniform grid on a rectangle (or interval) with periodic or Dirichlet axes.

    Periodic axes of N nodes cover [lo, hi) with spacing (hi - lo)/N; Dirichlet
    axes place N interior nodes with spacing (hi - lo)/(N + 1). One dimensional
    grids run along x1 at x2 = ``transverse``.
    """
    extents: Tuple[Tuple[float, float], ...]
    counts: Tuple[int, ...]
    boundaries: Tuple[Boundary, ...]
    transverse: float = 0.0

    def __post_init__(self):
        if not 1 <= len(self.counts) <= 2 or len(self.extents) != len(self.counts) \
                or len(self.boundaries) != len(self.counts):
            raise DomainError("A grid needs matching extents, counts and boundaries in one or two dimensions")
        if any(count < 8 for count in self.counts):
            raise DomainError("Every grid axis needs at least 8 nodes, got %s" % (self.counts,))
        if any(hi <= lo for lo, hi in self.extents):
            raise DomainError("Grid extents must be increasing, got %s" % (self.extents,))

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def spacing(self, axis: int) -> float:
        lo, hi = self.extents[axis]
        if self.boundaries[axis] == Boundary.PERIODIC:
            return (hi - lo) / self.counts[axis]
        return (hi - lo) / (self.counts[axis] + 1)

    def axis_nodes(self, axis: int) -> np.ndarray:
        lo, _ = self.extents[axis]
        h = self.spacing(axis)
        if self.boundaries[axis] == Boundary.PERIODIC:
            return lo + h * np.arange(self.counts[axis])
        return lo + h * np.arange(1, self.counts[axis] + 1)

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flattened node coordinates in row-major ('ij') order."""
        if self.dimension == 1:
            x1 = self.axis_nodes(0)
            return x1, np.full_like(x1, self.transverse)
        x1, x2 = np.meshgrid(self.axis_nodes(0), self.axis_nodes(1), indexing="ij")
        return x1.ravel(), x2.ravel()

    @property
    def cell_volume(self) -> float:
        return float(np.prod([self.spacing(axis) for axis in range(self.dimension)]))


@dataclasses.dataclass
class SpinorGridFn:
    """Spinor samples on a grid, stored component-major as a vector of length 2·size."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        if self.values.size != 2 * self.grid.size:
            raise DomainError("Expected %d samples, got %d" % (2 * self.grid.size, self.values.size))

    @classmethod
    def from_function(cls, grid: Grid, function: ClosedFormSpinorFn) -> SpinorGridFn:
        x1, x2 = grid.nodes()
        return cls(grid, function(x1, x2).reshape(-1))

    def inner(self, other: SpinorGridFn) -> complex:
        return complex(np.vdot(self.values, other.values) * self.grid.cell_volume)

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self).real))


def apply_h(hamiltonian: HamiltonianSpec, psi: Union[ClosedFormSpinorFn, SpinorGridFn], x1=None, x2=None,
            order: int = 4):
    """
    Evaluate (Hψ).

    For a closed-form ψ the result at the given points is returned (a Spinor for a
    single point, an array (2, P) otherwise); for grid samples the discretized
    Hamiltonian is applied and a SpinorGridFn returned.
    """
    if isinstance(psi, SpinorGridFn):
        return SpinorGridFn(psi.grid, discretize(hamiltonian, psi.grid, order) @ psi.values)
    x1, x2, scalar = as_points(x1, x2)
    hamiltonian.field.check_domain(x1, x2)
    value = psi(x1, x2)
    hessian = psi.hessian(x1, x2)
    magnetic = sigma_dot(hamiltonian.field.value(x1, x2))
    result = -(hessian[0, 0] + hessian[1, 1]) + np.einsum("pij,jp->ip", magnetic, value)
    result = result + hamiltonian._potential_jet.evaluate(x1, x2) * value
    if scalar:
        return Spinor.from_array(result[:, 0])
    return result


_FIRST = {2: ((-1, -0.5), (1, 0.5)),
          4: ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12))}
_SECOND = {2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
           4: ((-2, -1 / 12), (-1, 4 / 3), (0, -5 / 2), (1, 4 / 3), (2, -1 / 12))}


def _stencil_matrix(stencil, count: int, spacing: float, power: int, periodic: bool) -> scipy.sparse.csr_matrix:
    rows, columns, weights = [], [], []
    index = np.arange(count)
    for offset, weight in stencil:
        target = index + offset
        if periodic:
            keep = np.ones(count, dtype=bool)
            target = target % count
        else:
            keep = (target >= 0) & (target < count)
        rows.append(index[keep])
        columns.append(target[keep])
        weights.append(np.full(int(keep.sum()), weight))
    matrix = scipy.sparse.coo_matrix((np.concatenate(weights), (np.concatenate(rows), np.concatenate(columns))),
                                     shape=(count, count))
    return (matrix / spacing ** power).tocsr()


def derivative_matrices(grid: Grid, order: int = 4) -> Tuple[scipy.sparse.csr_matrix, ...]:
    """Scalar difference matrices (∂₁, ∂₂, Δ) on the grid nodes."""
    if order not in _FIRST:
        raise DomainError("Finite difference order must be 2 or 4, got %s" % order)
    axes = []
    for axis in range(grid.dimension):
        periodic = grid.boundaries[axis] == Boundary.PERIODIC
        h = grid.spacing(axis)
        axes.append((_stencil_matrix(_FIRST[order], grid.counts[axis], h, 1, periodic),
                     _stencil_matrix(_SECOND[order], grid.counts[axis], h, 2, periodic)))
    if grid.dimension == 1:
        first, second = axes[0]
        return first, scipy.sparse.csr_matrix(first.shape), second
    identity_1 = scipy.sparse.identity(grid.counts[0], format="csr")
    identity_2 = scipy.sparse.identity(grid.counts[1], format="csr")
    d1 = scipy.sparse.kron(axes[0][0], identity_2, format="csr")
    d2 = scipy.sparse.kron(identity_1, axes[1][0], format="csr")
    laplacian = scipy.sparse.kron(axes[0][1], identity_2, format="csr") + \
        scipy.sparse.kron(identity_1, axes[1][1], format="csr")
    return d1, d2, laplacian


def _node_values(expression: sympy.Expr, x1: np.ndarray, x2: np.ndarray, name: str) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        values = ExprJet(expression).evaluate(x1, x2)
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise DomainError("Coefficient %s is singular at grid node %d (%g, %g)" % (name, index, x1[index], x2[index]))
    return values


def discretize(operator: Union[HamiltonianSpec, FirstOrderOperator, DifferentialOperator], grid: Grid,
               order: int = 4) -> scipy.sparse.csr_matrix:
    """
    Sparse finite difference matrix of an operator on the grid.

    First order terms X·P are discretized in the symmetric form ½(X D + D X)(-i),
    so Hermitian operators give Hermitian matrices.

    :raises DomainError: If a coefficient is singular at a node; the node index is reported.
    """
    x1, x2 = grid.nodes()
    if isinstance(operator, HamiltonianSpec):
        mask = operator.field.domain_mask(x1, x2)
        if not np.all(mask):
            index = int(np.argmin(mask))
            raise DomainError("Grid node %d (%g, %g) lies outside the domain of %s"
                              % (index, x1[index], x2[index], operator.field.name))
    if isinstance(operator, (HamiltonianSpec, FirstOrderOperator)):
        operator = operator.as_operator()
    d1, d2, laplacian = derivative_matrices(grid, order)
    derivatives = (d1, d2)
    size = grid.size
    blocks = {mu: scipy.sparse.csr_matrix((size, size), dtype=complex) for mu in range(4)}
    for mu, coefficients in operator.momentum.items():
        for axis, coefficient in enumerate(coefficients):
            if coefficient.is_zero is True:
                continue
            values = scipy.sparse.diags(_node_values(coefficient, x1, x2, "X^{%d%d}" % (mu, axis + 1)))
            blocks[mu] = blocks[mu] - 0.5j * (values @ derivatives[axis] + derivatives[axis] @ values)
    for mu, coefficient in operator.potential.items():
        blocks[mu] = blocks[mu] + scipy.sparse.diags(_node_values(coefficient, x1, x2, "Y^%d" % mu))
    if operator.laplacian != 0:
        blocks[0] = blocks[0] - operator.laplacian * laplacian
    matrix = sum(scipy.sparse.kron(PAULI[mu], blocks[mu], format="csr") for mu in range(4))
    return scipy.sparse.csr_matrix(matrix)


def smooth_probes(grid: Grid, count: int, seed: int, max_mode: int = 3) -> List[SpinorGridFn]:
    """Seeded low-frequency spinor samples, periodic or vanishing at the boundary as the grid requires."""
    rng = np.random.default_rng(seed)
    x = grid.nodes()
    probes = []
    for _ in range(count):
        components = []
        for _component in range(2):
            total = np.ones(grid.size, dtype=complex)
            for axis in range(grid.dimension):
                lo, hi = grid.extents[axis]
                phase = (x[axis] - lo) / (hi - lo)
                if grid.boundaries[axis] == Boundary.PERIODIC:
                    modes = np.arange(-max_mode, max_mode + 1)
                    basis = np.exp(2j * np.pi * np.outer(modes, phase))
                else:
                    modes = np.arange(1, max_mode + 1)
                    basis = np.sin(np.pi * np.outer(modes, phase))
                weights = rng.normal(size=modes.size) + 1j * rng.normal(size=modes.size)
                total = total * (weights @ basis)
            components.append(total)
        probes.append(SpinorGridFn(grid, np.concatenate(components)))
    return probes


def commutator_residual(h_matrix: scipy.sparse.spmatrix, q_matrix: scipy.sparse.spmatrix,
                        probes: Sequence[SpinorGridFn], margin: int = 0, normalize: str = "operator") -> float:
    """
    Largest ‖(HQ - QH)ψ‖ over the probes.

    With ``normalize="operator"`` the result is divided by ‖H‖_∞‖ψ‖, with ``"probe"``
    by ‖ψ‖ only. On Dirichlet grids ``margin`` nodes next to each boundary are
    excluded, where the truncated stencils do not commute.
    """
    commutator = h_matrix @ q_matrix - q_matrix @ h_matrix
    scale = 1.0
    if normalize == "operator":
        scale = scipy.sparse.linalg.norm(h_matrix, np.inf)
    elif normalize != "probe":
        raise DomainError("normalize must be 'operator' or 'probe', got %s" % normalize)
    worst = 0.0
    for probe in probes:
        residual = commutator @ probe.values
        if margin:
            residual = residual * np.tile(_interior_mask(probe.grid, margin), 2)
        worst = max(worst, float(np.linalg.norm(residual) / (scale * np.linalg.norm(probe.values))))
    return worst


def _interior_mask(grid: Grid, margin: int) -> np.ndarray:
    masks = []
    for axis in range(grid.dimension):
        index = np.arange(grid.counts[axis])
        if grid.boundaries[axis] == Boundary.PERIODIC:
            masks.append(np.ones(grid.counts[axis], dtype=bool))
        else:
            masks.append((index >= margin) & (index < grid.counts[axis] - margin))
    if grid.dimension == 1:
        return masks[0]
    return np.logical_and.outer(masks[0], masks[1]).ravel()


def lowest_eigenvalues(matrix: scipy.sparse.spmatrix, count: int, seed: int = 0,
                       dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """
    The ``count`` smallest eigenvalues of a Hermitian matrix in ascending order.

    Small matrices are diagonalized densely; larger ones with ARPACK's Lanczos
    iteration started from a seeded vector, so repeated runs agree.
    """
    dimension = matrix.shape[0]
    if not 0 < count < dimension:
        raise DomainError("Cannot compute %d eigenvalues of a %d x %d matrix" % (count, dimension, dimension))
    if dimension <= dense_limit:
        dense = matrix.toarray() if scipy.sparse.issparse(matrix) else np.asarray(matrix)
        return scipy.linalg.eigh(dense, eigvals_only=True, subset_by_index=[0, count - 1])
    rng = np.random.default_rng(seed)
    start = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)
    values = scipy.sparse.linalg.eigsh(matrix, k=count, which="SA", v0=start, tol=1e-12,
                                       return_eigenvectors=False)
    return np.sort(values.real)


def rayleigh_quotient(matrix: scipy.sparse.spmatrix, psi: SpinorGridFn) -> float:
    """⟨ψ, Mψ⟩ / ⟨ψ, ψ⟩."""
    return float((np.vdot(psi.values, matrix @ psi.values) / np.vdot(psi.values, psi.values)).real)
