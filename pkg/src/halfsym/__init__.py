"""Reflection symmetry and half-object tooling for point-cloud shape generation."""
