"""Frozen contextual embedding export to the GSEM exchange format."""

from .corpus import CorpusSentence, load_sentences
from .export import ExportManifest, export, export_synthetic, token_vector
from .gsem import write_gsem

__version__ = "0.1.0"
