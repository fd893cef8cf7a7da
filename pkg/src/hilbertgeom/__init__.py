"""Planar Hilbert geometry: distances, Finsler balls, Hilbert area and extremal triangles."""
