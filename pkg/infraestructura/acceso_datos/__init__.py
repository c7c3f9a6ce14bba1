"""Persistencia de artefactos: contextos, mapeadores, exportadores y repositorio de informes."""
