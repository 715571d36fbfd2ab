"""Machine certification of triple transitivity for strongly regular graphs."""

__version__ = "0.1.0"
