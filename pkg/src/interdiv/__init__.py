"""Interdisciplinarity and SDG-contribution analytics over bibliometric affinity scores."""

__version__ = "0.1.0"
