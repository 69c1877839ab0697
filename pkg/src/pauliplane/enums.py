"""Module holding all enums of pauliplane."""

from enum import Enum, auto


class FamilyId(Enum):
    """
    Identifiers of the catalogued magnetic field families.
    """
    T1_1 = "T1.1"
    T1_2 = "T1.2"
    T1_3 = "T1.3"
    T1_4 = "T1.4"
    T1_5 = "T1.5"
    T1_6 = "T1.6"
    T1_7 = "T1.7"
    T1_8 = "T1.8"
    T2_1 = "T2.1"
    T2_2 = "T2.2"
    T2_3 = "T2.3"
    T2_4 = "T2.4"

    @classmethod
    def from_string(cls, label: str) -> 'FamilyId':
        """Look up a family by its catalog label, e.g. ``"T2.1"``."""
        for member in cls:
            if member.value == label.strip():
                return member
        raise ValueError("Unknown field family %s" % label)


class OperatorId(Enum):
    """
    Labels of the symmetry operators attached to the catalog families.
    """
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    Q5 = "Q5"
    Q6 = "Q6"
    Q1_TILDE = "Q̃1"
    Q2_TILDE = "Q̃2"
    P1 = "P1"
    P2 = "P2"
    L = "L"
    SIGMA3 = "σ3"


class Regime(Enum):
    """
    Condition sets under which the reduced determining system applies.
    """
    ROTATION_AND_SPIN = "co1"
    """ab ≠ 0, c₃ = c₄ = 0"""
    SPIN_ROTATION = "co2"
    """a = 0, b ≠ 0, d₁ = d₂ = 0"""
    ROTATION = "co3"
    """a ≠ 0, b = 0, c₃ = c₄ = d₁ = d₂ = 0"""
    SPIN_TRANSLATION = "co4"
    """a = b = 0, c₁² + c₂² ≠ 0"""


class SymmetryKind(Enum):
    LIE = auto()
    HIGHER = auto()


class RelationId(Enum):
    """
    Algebraic relations between symmetry operators.
    """
    SA1 = "SA1"
    SA2 = "SA2"
    SA11 = "SA11"
    SA3 = "SA3"
    SA31 = "SA31"
    QR = "QR"
    QR2 = "QR2"
    AL = "AL"
    CA = "CA"


class Boundary(Enum):
    """
    Boundary conditions of a discretization axis.
    """
    PERIODIC = 0
    DIRICHLET = 1


class Domain(Enum):
    """
    Domains on which fields and spinor functions are defined.
    """
    PLANE = 0
    PUNCTURED_PLANE = 1
    DISC = 2


class TransformKind(Enum):
    """
    Equivalence transformations acting on fields and operators.
    """
    SHIFT = 0
    PLANE_ROTATION = 1
    SPIN_ROTATION = 2
    SCALING = 3


class ModelKind(Enum):
    """
    Exactly solvable models available through the spectrum command.
    """
    PERIODIC = "periodic"
    RADIAL = "radial"
    SUSY = "susy"


class CheckStatus(Enum):
    """
    Enum for readable descriptions of a check's status.
    """
    CREATED = 0
    RUNNING = 1
    PASSED = 2
    FAILED = 3
