"""Static figure renderers for bext output files."""

__version__ = "0.1.0"
