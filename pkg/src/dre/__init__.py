"""Anytime decoupled robustness envelopes for temporal plans."""
__version__ = "0.1.0"
