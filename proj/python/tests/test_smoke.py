import math

import pytest

import polyhybrid as ph

SCUTOID = [
    [2, 5, 12], [3, 1, 8], [4, 2, 9], [10, 5, 3], [1, 4, 11], [12, 11, 7],
    [12, 6, 8], [2, 7, 9], [3, 8, 10], [9, 11, 4], [5, 10, 6], [1, 6, 7],
]


def test_scutoid_counts():
    c = ph.polyhedron_counts(SCUTOID)
    assert (c["vertices"], c["edges"], c["faces"], c["euler_characteristic"]) == (12, 18, 8, 2)


def test_voronoi_mesh():
    m = ph.voronoi_mesh(2)
    assert m.num_cells == 9
    assert math.isclose(m.total_area, 1.0, abs_tol=1e-12)
    s = ph.mesh_summary(m)
    assert s["cells"] == 9
    assert len(m.cell_vertices(0)) >= 3
    with pytest.raises(IndexError):
        m.cell_vertices(9)


def test_perturbed_mesh_is_deterministic():
    a = ph.voronoi_mesh(5, perturb=0.3, seed=4)
    b = ph.voronoi_mesh(5, perturb=0.3, seed=4)
    assert a.vertices() == b.vertices()


def test_methods_and_quadratic_exactness():
    assert set(ph.method_names()) == {"dg", "hdg", "hho", "elasticity", "stokes", "control"}
    r = ph.solve("hho", ph.voronoi_mesh(4), 1, case="quadratic")
    assert r["err_l2"] < 1e-9
    assert r["dofs_condensed"] > 0


def test_stokes_notes_and_extras():
    r = ph.solve("stokes", ph.voronoi_mesh(3), 0)
    assert "pressure_l2" in r["extra"]
    assert any("sparse LU" in n for n in r["notes"])


def test_convergence_rate():
    rows = ph.convergence_study("hho", 0, [4, 8, 16], case="sine")
    assert len(rows) == 3
    assert math.isnan(rows[0]["eoc_l2"])
    assert rows[-1]["eoc_l2"] > 1.7


def test_errors_are_translated():
    with pytest.raises(ph.PolyhybridError):
        ph.voronoi_mesh(1)
    with pytest.raises(ph.PolyhybridError):
        ph.solve("fem", ph.voronoi_mesh(2), 1)
    with pytest.raises(TypeError):
        ph.solve("hho", ph.voronoi_mesh(2), 1, bogus=1.0)
