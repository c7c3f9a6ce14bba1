"""
Configuración de nlsregime: carga en capas (defaults, entorno, archivo de
usuario, overrides --set) y logging estructurado.
"""
