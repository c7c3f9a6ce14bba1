"""
Capa de dominio de nlsregime.

Modelos de dispersión, variables rectificantes, excitaciones, integrales de
interacción, ecuaciones envolventes, modelo de red y solver modal de referencia.
"""
