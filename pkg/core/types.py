from enum import Enum
from typing import NewType

# Scalars with a fixed meaning across the estimators
TailIndex = NewType("TailIndex", float)
Level = NewType("Level", float)
Seed = NewType("Seed", int)


class FamilyKind(str, Enum):
    """Generator families of consistent elliptical laws."""

    GAUSSIAN = "gaussian"
    STUDENT = "student"
    UGM = "ugm"
    SLASH = "slash"


class KernelKind(str, Enum):
    """Smoothing kernels for the generator estimate."""

    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"


class HillMode(str, Enum):
    """Statistic W fed to the Hill estimator."""

    COMPONENT = "component"
    MAHALANOBIS_NORM = "mahalanobis_norm"


class ExtremalRegime(str, Enum):
    """Which of k_n and n*h_n drives the joint limit of (eta_hat, ell_hat)."""

    KN_DOMINATES = "kn_dominates"
    NHN_DOMINATES = "nhn_dominates"
    AMBIGUOUS = "ambiguous"


class QuantileRegime(str, Enum):
    """Intermediate (interpolation) or high (extrapolation) level sequence."""

    INTERMEDIATE = "intermediate"
    HIGH = "high"


class MeasureKind(str, Enum):
    """Risk measure estimated from the extreme quantile."""

    QUANTILE = "quantile"
    LP_QUANTILE = "lp"
    HAEZENDONCK_GOOVAERTS = "hg"


class Tail(str, Enum):
    """Tail of the conditional law being estimated."""

    UPPER = "upper"
    LOWER = "lower"
