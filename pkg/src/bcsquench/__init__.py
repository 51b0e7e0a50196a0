"""Quench dynamics of the BCS pseudospin model in a cavity-QED setting."""

__version__ = "0.1.0"
