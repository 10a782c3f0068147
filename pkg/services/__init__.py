"""Numerical services layer.

Core services for qslkit:
- operator_algebra: operators, Pauli strings, bases and the Hilbert-Schmidt geometry
- qsl_core: eigenphases, minimal spread and the optimal constant generator
- scqc_geometry: space curves, Frenet frames and rotation planes
- certifiers: certifying sets and the bottleneck lower bound
- gate_library: named gates, diagonal generators and geometry classes
- repository: gate registry
"""

from services import certifiers, gate_library, operator_algebra, qsl_core, repository, scqc_geometry

__all__ = [
    "certifiers",
    "gate_library",
    "operator_algebra",
    "qsl_core",
    "repository",
    "scqc_geometry",
]
