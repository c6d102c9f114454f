# ============================================================================
# src/__init__.py
# ============================================================================

"""Raman mixture identification package."""

__version__ = "0.1.0"
