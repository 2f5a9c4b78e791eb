"""Exact polyhedral chains, (co)homology and Steenrod operations, with
numerical checks of the squashing deformations."""

__version__ = "0.1.0"
