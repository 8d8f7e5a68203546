"""Automata-based decision procedure for Buchi arithmetic and the
interpretations between Buchi arithmetics of different bases."""

__version__ = "0.1.0"
