"""Command-line entry point; the only part of the package that touches files."""

from .main import main

__all__ = ["main"]
