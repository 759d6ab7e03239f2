"""dgcube: exact verification of dg-nerve, cobordism-cube and staircase-disk
combinatorics over Z and Z/2."""

from .gradedmod import Mode

__all__ = ["Mode"]
__version__ = "0.1.0"
