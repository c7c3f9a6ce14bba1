"""Rectifying change of variables and the Taylor polynomial of a band."""

from .rectificador import RectifyMap, gamma_poly, y_forward, y_inverse

__all__ = ["RectifyMap", "gamma_poly", "y_forward", "y_inverse"]
