"""Generator families of consistent elliptical distributions.

Each family knows its normalized generator c_d g_d(t), i.e. the density of a
d-dimensional member evaluated at Mahalanobis distance t, and its tail index.
"""

import math
from dataclasses import dataclass
from typing import ClassVar

from core.special import chi2_cdf, gamma_ratio
from core.types import FamilyKind


@dataclass(frozen=True)
class Gaussian:
    """Gaussian generator, light tailed (eta = ell = 1)."""

    kind: ClassVar[FamilyKind] = FamilyKind.GAUSSIAN

    @property
    def tail_index(self) -> float | None:
        return None

    def generator_density(self, d: int, t: float) -> float:
        return (2.0 * math.pi) ** (-d / 2.0) * math.exp(-t / 2.0)

    def to_dict(self) -> dict[str, object]:
        return {"family": self.kind.value}


@dataclass(frozen=True)
class Student:
    """Student generator with ``nu`` degrees of freedom, tail index 1/nu."""

    nu: float
    kind: ClassVar[FamilyKind] = FamilyKind.STUDENT

    def __post_init__(self) -> None:
        if not self.nu > 0.0:
            raise ValueError(f"Student nu must be positive, got {self.nu}")

    @property
    def tail_index(self) -> float | None:
        return 1.0 / self.nu

    def generator_density(self, d: int, t: float) -> float:
        nu = self.nu
        norm = gamma_ratio((nu + d) / 2.0, nu / 2.0) / (nu * math.pi) ** (d / 2.0)
        return norm * (1.0 + t / nu) ** (-(nu + d) / 2.0)

    def to_dict(self) -> dict[str, object]:
        return {"family": self.kind.value, "nu": self.nu}


@dataclass(frozen=True)
class UniformGaussianMixture:
    """Scale mixture of Gaussians: component k has weight pi_k and precision scale theta_k."""

    weights: tuple[float, ...]
    rates: tuple[float, ...]
    kind: ClassVar[FamilyKind] = FamilyKind.UGM

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.rates) or not self.weights:
            raise ValueError("UGM weights and rates must be non-empty and of equal length")
        if any(w < 0.0 for w in self.weights):
            raise ValueError(f"UGM weights must be non-negative, got {self.weights}")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"UGM weights must sum to 1, got {math.fsum(self.weights)}")
        if any(r <= 0.0 for r in self.rates):
            raise ValueError(f"UGM rates must be positive, got {self.rates}")

    @property
    def tail_index(self) -> float | None:
        return None

    def generator_density(self, d: int, t: float) -> float:
        return (2.0 * math.pi) ** (-d / 2.0) * math.fsum(
            w * r**d * math.exp(-(r**2) * t / 2.0)
            for w, r in zip(self.weights, self.rates, strict=True)
        )

    def to_dict(self) -> dict[str, object]:
        return {"family": self.kind.value, "weights": list(self.weights), "rates": list(self.rates)}


@dataclass(frozen=True)
class Slash:
    """Slash generator G / U^(1/a), tail index 1/a."""

    a: float
    kind: ClassVar[FamilyKind] = FamilyKind.SLASH

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"Slash a must be positive, got {self.a}")

    @property
    def tail_index(self) -> float | None:
        return 1.0 / self.a

    def generator_density(self, d: int, t: float) -> float:
        if t <= 0.0:
            # limit of the integral representation at the center
            return self.a / (self.a + d) * (2.0 * math.pi) ** (-d / 2.0)
        s = (self.a + d) / 2.0
        return (
            self.a
            * (2.0 * math.pi) ** (-d / 2.0)
            * 2.0 ** (s - 1.0)
            * math.exp(math.lgamma(s))
            * t ** (-s)
            * chi2_cdf(self.a + d, t)
        )

    def to_dict(self) -> dict[str, object]:
        return {"family": self.kind.value, "a": self.a}


Family = Gaussian | Student | UniformGaussianMixture | Slash


def family_from_dict(data: dict[str, object]) -> Family:
    """Build a family from its JSON form, e.g. ``{"family": "student", "nu": 2.0}``."""
    kind = FamilyKind(str(data["family"]).lower())
    if kind is FamilyKind.GAUSSIAN:
        return Gaussian()
    if kind is FamilyKind.STUDENT:
        return Student(nu=float(data["nu"]))  # type: ignore[arg-type]
    if kind is FamilyKind.UGM:
        weights = tuple(float(w) for w in data["weights"])  # type: ignore[attr-defined]
        rates = tuple(float(r) for r in data["rates"])  # type: ignore[attr-defined]
        return UniformGaussianMixture(weights=weights, rates=rates)
    return Slash(a=float(data["a"]))  # type: ignore[arg-type]
