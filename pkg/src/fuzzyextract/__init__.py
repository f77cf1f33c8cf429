"""Approximate dictionary-based entity extraction with FuzzyED and Fuzzy Jaccard."""
from .corpus import (Document, Entity, IdfModel, WeightedTokenSet, build_idf_model, load_dictionary,
                     load_documents, make_document, make_entity, tokenize, weigh)
from .kernels import BACKEND
from .pipeline import Config, Extraction, Extractor, Stats, extract_document, resolve_overlaps

__all__ = [
    "BACKEND", "Config", "Document", "Entity", "Extraction", "Extractor", "IdfModel", "Stats",
    "WeightedTokenSet", "build_idf_model", "extract_document", "load_dictionary", "load_documents",
    "make_document", "make_entity", "resolve_overlaps", "tokenize", "weigh",
]
