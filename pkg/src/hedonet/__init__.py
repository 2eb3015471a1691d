"""Reciprocal-reply networks and the happiness of the people in them."""

__version__ = "0.1.0"
