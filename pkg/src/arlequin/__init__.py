"""Preprocessing and validation toolkit for concurrent FE-MD (Arlequin) coupling."""

__version__ = "0.1.0"
