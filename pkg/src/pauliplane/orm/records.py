"""ORM classes of residual and spectrum results."""
from typing import Optional

from sqlalchemy.orm import Mapped, mapped_column

from .base import Base


class ResidualRecord(Base):
    """ORM equivalent of pauliplane.determining.ResidualReport."""

    family: Mapped[str]
    subject: Mapped[str]
    kind: Mapped[str]
    seed: Mapped[Optional[int]]
    n_points: Mapped[int]
    max_residual: Mapped[float]
    mean_residual: Mapped[float]
    tolerance: Mapped[float]
    passed: Mapped[bool]
    printed_residual: Mapped[Optional[float]] = mapped_column(default=None)
    """Residual of the printed variant of a relation, if any."""


class SpectrumRecord(Base):
    """One row of a spectrum table: closed form value against the numerical one."""

    model: Mapped[str]
    label: Mapped[str]
    """Level index or sector label."""
    closed_form: Mapped[float]
    numeric: Mapped[Optional[float]]
    abs_err: Mapped[Optional[float]]
    rel_err: Mapped[Optional[float]]
