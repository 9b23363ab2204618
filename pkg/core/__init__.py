"""Elliptical model primitives: families, moments, sampling and special functions."""

from .elliptical import (
    ConditionalMoments,
    EllipticalModel,
    SampleMatrix,
    conditional_moments,
    mahalanobis,
    mahalanobis_many,
    mahalanobis_norm,
    whiten,
)
from .families import Family, Gaussian, Slash, Student, UniformGaussianMixture
from .model_spec import ModelSpec
from .sampling import make_rng, sample

__all__ = [
    "ConditionalMoments",
    "EllipticalModel",
    "Family",
    "Gaussian",
    "ModelSpec",
    "SampleMatrix",
    "Slash",
    "Student",
    "UniformGaussianMixture",
    "conditional_moments",
    "mahalanobis",
    "mahalanobis_many",
    "mahalanobis_norm",
    "make_rng",
    "sample",
    "whiten",
]
