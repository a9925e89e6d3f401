"""Hybrid polytopal finite element solvers (DG, HDG, HHO) on 2D polygonal meshes."""

import json

from ._core import (
    Mesh,
    PolyhybridError,
    cartesian_mesh,
    convergence_study,
    default_case,
    method_names,
    polyhedron_counts,
    solve,
    voronoi_mesh,
    voronoi_mesh_from_sites,
)


def mesh_summary(mesh):
    """Mesh statistics as a dict."""
    return json.loads(mesh.summary_json())


__all__ = [
    "Mesh",
    "PolyhybridError",
    "cartesian_mesh",
    "convergence_study",
    "default_case",
    "mesh_summary",
    "method_names",
    "polyhedron_counts",
    "solve",
    "voronoi_mesh",
    "voronoi_mesh_from_sites",
]
