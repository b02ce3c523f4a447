"""Hecke points on the modular surface and their equidistribution."""

from .arith import DivisorType, IntMat2, content, det, hnf, is_unimodular_quotient, mat_mul, snf
from .hecke import (
    CosetList,
    HeckeElement,
    canonicalize,
    coset_reps,
    degree,
    diag,
    hecke_points,
    index_via_bfs,
)
from .hyperbolic import MeasureConfig, ReducedPoint, UHPoint, hyp_dist, mobius, reduce
from .observables import TestFunction, builtin_family, reference

__version__ = "0.1.0"
