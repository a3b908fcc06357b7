"""
Командная строка cfdim.
"""

from .main import cli, execute, main

__all__ = ["cli", "execute", "main"]
