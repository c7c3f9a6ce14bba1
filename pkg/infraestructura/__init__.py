"""Infraestructura: persistencia de tablas CSV y del resumen JSON."""
