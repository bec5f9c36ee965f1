"""Satisfiability and equivalence of circuits over finite algebras."""

__version__ = "0.1.0"
