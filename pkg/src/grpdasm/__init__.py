"""Groupoid assemblies over the SK combinatory algebra, at desk scale.

Modules: ``pca`` (terms and evaluation), ``rset`` (realizer sets and the
tripos of predicates), ``asm`` (assemblies), ``grpd`` (groupoid
assemblies), ``fib`` (fibrations and deformations), ``ho`` (regular
equivalences, Part and Clus), ``wset`` (W-types) and ``cli``.
"""
from __future__ import annotations

__version__ = "0.1.0"
