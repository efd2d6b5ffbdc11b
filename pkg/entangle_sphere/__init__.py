"""Geometric sphere model of two entangled spin 1/2 systems."""
