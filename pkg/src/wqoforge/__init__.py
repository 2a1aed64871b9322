"""Deciding well-quasi-ordering of graph classes given by MSO interpretations over words."""

__version__ = "0.1.0"
