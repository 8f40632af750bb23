"""Symmetric caching lab library."""
