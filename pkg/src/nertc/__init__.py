"""KB-driven NER/TC corpus construction and evaluation toolkit."""

__version__ = "0.1.0"
