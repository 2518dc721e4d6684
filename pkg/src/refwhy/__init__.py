"""refwhy: mine refactoring history, extract motivations, analyze the metrics."""

__version__ = "0.1.0"
