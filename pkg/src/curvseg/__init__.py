"""Seeded two-class segmentation by global minimization of contrast-weighted
boundary curvature on the 8-connected pixel lattice."""

from . import core
from .curvature import CurvatureParams, EdgeSet, effective_edges
from .energy import AttractionMode, QPBEnergy, UNLABELED
from .lattice import GrayImage, SeedLabel, SeedMask, load_image, load_seeds
from .qpbo import SolveReport, probe, quantize, solve_qpbo
from .segmenter import SegmentationParams, SegmentationResult, segment
from .synthcorpus import ControlCase, brute_force_optimum, default_cases, dice

__version__ = "0.1.0"

__all__ = [
    "AttractionMode",
    "ControlCase",
    "CurvatureParams",
    "EdgeSet",
    "GrayImage",
    "QPBEnergy",
    "SeedLabel",
    "SeedMask",
    "SegmentationParams",
    "SegmentationResult",
    "SolveReport",
    "UNLABELED",
    "brute_force_optimum",
    "core",
    "default_cases",
    "dice",
    "effective_edges",
    "load_image",
    "load_seeds",
    "probe",
    "quantize",
    "segment",
    "solve_qpbo",
    "__version__",
]
