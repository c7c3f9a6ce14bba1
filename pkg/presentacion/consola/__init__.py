"""Consola de línea de comandos ``nlsregime``."""
