"""assumption-forge: mine repository text, label assumption sentences, train classifiers."""

__version__ = "0.1.0"
