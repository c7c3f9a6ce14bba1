"""Servicios de aplicación que coordinan la ejecución de experimentos."""
