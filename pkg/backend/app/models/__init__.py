# backend/app/models/__init__.py
from .form_matrix import FormMatrix
from .jordan import BlockTag, JordanComponent, JordanSplitting
from .reports import (
    BinaryUnitProfile,
    Decision,
    FixtureResult,
    GapReport,
    GlobalVerdict,
    Hypothesis,
    HypothesisStatus,
    LocalAnalysis,
    ProgressionWitness,
    RepVerdict,
    Rule,
    ScanReport,
    SpectrumReport,
    Theorem3Report,
    TraceEntry,
    Tri,
    UniversalityReport,
)
from .square_class import SignedSquareClass, SquareClass, smallest_nonresidue, unit_representatives

__all__ = [
    "BinaryUnitProfile",
    "BlockTag",
    "Decision",
    "FixtureResult",
    "FormMatrix",
    "GapReport",
    "GlobalVerdict",
    "Hypothesis",
    "HypothesisStatus",
    "LocalAnalysis",
    "JordanComponent",
    "JordanSplitting",
    "ProgressionWitness",
    "RepVerdict",
    "Rule",
    "ScanReport",
    "SignedSquareClass",
    "SpectrumReport",
    "SquareClass",
    "Theorem3Report",
    "TraceEntry",
    "Tri",
    "UniversalityReport",
    "smallest_nonresidue",
    "unit_representatives",
]
