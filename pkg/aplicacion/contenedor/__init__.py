"""Construcción de objetos del dominio a partir de la configuración."""
