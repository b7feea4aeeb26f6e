"""French dialect identification from text with classical classifiers."""

__version__ = "0.1.0"
