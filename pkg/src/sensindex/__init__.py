"""Sense-aware sentence indexing and question answering for French text."""

from .index import InfoStructure, load, save
from .pipeline import Pipeline
from .query import Answer, LightStructure, Weights

__all__ = ["InfoStructure", "Pipeline", "Answer", "LightStructure", "Weights", "load", "save"]
__version__ = "0.1.0"
