"""Static analysis of project smells in Python ML projects."""

__version__ = "0.1.0"
