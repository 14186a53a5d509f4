"""Toolkit for stabilizer mutual information, lightcones, depth certificates and
constant-depth compilation."""

__version__ = "0.1.0"
