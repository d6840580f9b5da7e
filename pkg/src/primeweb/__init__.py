"""Prime progression matrices, analytic law checks, and spiral webs."""

__version__ = "0.1.0"
