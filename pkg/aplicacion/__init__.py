"""
Módulo de aplicación - nlsregime
Experimentos, ajuste de pendientes, configurador y controlador de ejecución
"""

__version__ = "0.1.0"
