"""Workbench for sentence-level reductions between monadic and guarded SNP fragments."""

__version__ = "0.1.0"
