import cmath
import json
import math

import numpy as np
import pytest

from extbloch.flatten_solver import solve_flattening
from extbloch.flattening import EDGE_COMPONENT
from extbloch.invariants import labeled_invariants, lens_chain, random_base_points, rotation
from extbloch.shapes import ShapeAssignment
from extbloch.tricomplex import (
    EmptyComplexError,
    GluingError,
    LinkError,
    MoveError,
    NotACycleError,
    OrientationError,
    ParseError,
    coboundary,
    cycle_from_homogeneous_chain,
    isomorphic,
    pachner_23,
    pachner_32,
    parse,
    serialize,
)


def doc(tets, **extra):
    return json.dumps({"name": "t", "tetrahedra": [{"neighbors": n, "gluings": g} for n, g in tets],
                       **extra})


ALL = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]


def test_m004_structure(m004):
    assert len(m004) == 2
    assert m004.signs == (1, -1)
    assert [ec.valence for ec in m004.edges] == [6, 6]
    assert sum(ec.valence for ec in m004.edges) == 6 * len(m004)
    assert m004.num_vertices == 1
    assert len(m004.links) == 1 and m004.links[0].genus == 1 and m004.links[0].kind == "cusp"
    # faces: four 2-simplices
    faces = {frozenset([(t, f), (m004.neighbors[t][f], m004.faces[t][f])])
             for t in range(2) for f in range(4)}
    assert len(faces) == 4


def test_edge_classes_partition(m004):
    seen = [(t, e) for ec in m004.edges for t, e, _ in ec.incidences]
    assert sorted(seen) == [(t, e) for t in range(len(m004)) for e in range(6)]


def test_serialize_round_trip(m004):
    text = serialize(m004)
    again = parse(text)
    assert serialize(again) == text
    assert again.neighbors == m004.neighbors and again.faces == m004.faces


def test_parse_errors():
    with pytest.raises(ParseError):
        parse("{")
    with pytest.raises(ParseError):
        parse("[]")
    with pytest.raises(ParseError):
        parse(doc([([0, 0, 0], ALL)]))
    bad = [list(g) for g in ALL]
    bad[0] = [2, 1, 3]  # not order preserving
    with pytest.raises(GluingError, match="tet 0 face 0"):
        parse(doc([([0, 0, 0, 0], bad)]))


def test_non_involutive_gluing():
    # tet 0 face 0 -> tet 1 face 0, but tet 1 face 0 -> tet 1 face 1
    tets = [([1, 1, 1, 1], ALL), ([1, 0, 1, 1], [ALL[1], ALL[0], ALL[2], ALL[3]])]
    with pytest.raises(GluingError):
        parse(doc(tets))


def test_double_of_tetrahedron():
    tri = parse(doc([([1, 1, 1, 1], ALL), ([0, 0, 0, 0], ALL)]))
    assert tri.signs == (1, -1)
    assert all(lk.genus == 0 for lk in tri.links)
    assert [ec.valence for ec in tri.edges] == [2] * 6


def test_one_tet_cycle():
    # face 0 <-> face 1, face 2 <-> face 3
    tri = parse(doc([([0, 0, 0, 0], [ALL[1], ALL[0], ALL[3], ALL[2]])]))
    assert sum(ec.valence for ec in tri.edges) == 6


def test_non_orientable_rejected():
    # face 0 <-> face 2 forces a tet to disagree with itself
    with pytest.raises(OrientationError):
        parse(doc([([0, 0, 0, 0], [ALL[2], ALL[3], ALL[0], ALL[1]])]))


def test_normal_loop_basis(m004):
    duals = m004.dual_cycles()
    assert len(duals) == 4 - 2 + 1
    basis = m004.normal_loop_basis()
    assert len(basis) == 3 + 2
    for curve in basis:
        m004.validate_curve(curve)
    for ec in m004.edges:
        passed = sorted((p.tet, p.edge) for p in ec.loop.passes)
        incid = sorted((t, _edge_pair(e)) for t, e, _ in ec.incidences)
        assert passed == incid


def _edge_pair(e):
    from extbloch.flattening import EDGES
    return EDGES[e]


def test_invalid_curve_rejected(m004):
    from extbloch.tricomplex import NormalCurve
    with pytest.raises(GluingError):
        m004.validate_curve(NormalCurve.from_lists([[0, 0, 3, 1], [0, 0, 3, 1]]))


def test_log_holonomy_at_flattening(m004, m004_complete):
    sol = solve_flattening(m004, m004_complete)
    flats = m004_complete.flats(sol.pq)
    for curve in m004.edge_loops():
        assert abs(m004.log_holonomy(curve, flats)) < 1e-12
    for curve in m004.normal_loop_basis():
        assert m004.parity_along(curve, flats) == 0
    basis = m004.cusp_basis(0)
    for curve in (basis.meridian, basis.longitude):
        h = m004.log_holonomy(curve, flats)
        assert abs(h) < 1e-12
        assert m004.log_holonomy(curve.reversed(), flats) == pytest.approx(-h, abs=1e-14)


def test_edge_loop_in_shape_logs(m004, m004_complete):
    # logs of z, z', z'' around each edge add up to 2 pi i at the geometric shapes
    logs = m004_complete.log_shapes(m004.signs)
    for curve in m004.edge_loops():
        total = sum(c * logs[t][k] for t, k, c in m004.curve_terms(curve))
        assert total == pytest.approx(2j * math.pi, abs=1e-12)


def test_parity_flip(m004, m004_complete):
    sol = solve_flattening(m004, m004_complete)
    pq = list(sol.pq)
    pq[0] = (pq[0][0] + 1, pq[0][1])
    flats = m004_complete.flats(pq)
    for k, ec in enumerate(m004.edges):
        # adding pi i to w0 and -pi i to w2 of tet 0
        moved = sum(1 for t, e, _ in ec.incidences if t == 0 and EDGE_COMPONENT[e] != 1)
        assert m004.parity_along(ec.loop, flats) == moved % 2


def test_cusp_curve_holonomies(m004, rng):
    """The bundled curves give u = log z'' + log y'' and v = 2 log z - 2 log z''."""
    basis = m004.cusp_basis(0)
    for _ in range(20):
        z = complex(rng.uniform(-1, 2), rng.uniform(0.2, 2))
        y = complex(rng.uniform(-1, 2), rng.uniform(-2, -0.2))
        shapes = ShapeAssignment.principal([z, y])
        logs = shapes.log_shapes(m004.signs)
        u = sum(c * logs[t][k] for t, k, c in m004.curve_terms(basis.meridian))
        v = sum(c * logs[t][k] for t, k, c in m004.curve_terms(basis.longitude))
        zpp, ypp = 1 - 1 / z, 1 - 1 / y
        assert cmath.exp(u) == pytest.approx(zpp * ypp, rel=1e-12)
        assert cmath.exp(v) == pytest.approx(z ** 2 / zpp ** 2, rel=1e-12)


def test_default_basis_is_unimodular_change(m004, filled_runs):
    user = m004.cusp_basis(0)
    default = m004.default_cusp_basis(0)
    assert m004.is_link_nontrivial(default.meridian, 0)
    assert m004.is_link_nontrivial(default.longitude, 0)

    def hol(shapes, curve):
        logs = shapes.log_shapes(m004.signs)
        return sum(c * logs[t][k] for t, k, c in m004.curve_terms(curve))

    s1, s2 = filled_runs[(5, 1)].shapes, filled_runs[(1, 2)].shapes
    A = np.array([[hol(s1, user.meridian), hol(s1, user.longitude)],
                  [hol(s2, user.meridian), hol(s2, user.longitude)]])
    for curve in (default.meridian, default.longitude):
        rhs = np.array([hol(s1, curve), hol(s2, curve)])
        coef = np.linalg.solve(A, rhs)
        assert np.allclose(coef, np.round(coef.real), atol=1e-9)
    M = np.array([np.round(np.linalg.solve(A, [hol(s1, c), hol(s2, c)]).real)
                  for c in (default.meridian, default.longitude)])
    assert abs(round(np.linalg.det(M))) == 1


def test_vertex_loops_are_trivial(m004):
    for loop in m004.vertex_loops(0):
        assert not m004.is_link_nontrivial(loop, 0)


def test_sphere_links_have_no_cusp_basis():
    tri = parse(doc([([1, 1, 1, 1], ALL), ([0, 0, 0, 0], ALL)]))
    with pytest.raises(LinkError):
        tri.default_cusp_basis(0)


def _lens(n, seed=3):
    rng = np.random.default_rng(seed)
    a1, a2 = rng.uniform(0, math.pi, size=2)
    return lens_chain(n, rotation(a1), rotation(a2))


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_lens_complex(n):
    tri = cycle_from_homogeneous_chain(_lens(n), f"L({n},1)")
    assert len(tri) == n
    # every simplex has h1, g h1 as its first edge; they form one class
    central = {tri.edge_class_of[(t, 0)] for t in range(n)}
    assert len(central) == 1
    assert tri.edges[central.pop()].valence == n
    assert all(lk.genus == 0 for lk in tri.links)


def test_chain_pairing_order_irrelevant():
    chain = _lens(5)
    rng = np.random.default_rng(0)
    values = []
    for order in (range(5), rng.permutation(5)):
        tri = cycle_from_homogeneous_chain([chain[i] for i in order])
        res = labeled_invariants(tri, random_base_points(tri.num_vertices, np.random.default_rng(4)))
        values.append(res.reports[0].r_value)
    assert values[0].distance(values[1]) < 1e-9


def test_chain_errors():
    chain = _lens(4)
    with pytest.raises(NotACycleError):
        cycle_from_homogeneous_chain(chain[:1])
    with pytest.raises(EmptyComplexError):
        cycle_from_homogeneous_chain(chain + [(-s, g) for s, g in chain])


def test_coboundary_keeps_structure():
    tri = cycle_from_homogeneous_chain(_lens(3))
    tau = [rotation(0.3 * (k + 1)) for k in range(tri.num_vertices)]
    new = coboundary(tri, tau)
    assert new.neighbors == tri.neighbors and new.signs == tri.signs


def test_pachner_round_trip(m004):
    for t in range(2):
        for f in range(4):
            new = pachner_23(m004, t, f)
            assert len(new) == 3
            k = next(i for i, ec in enumerate(new.edges) if ec.valence == 3)
            back = pachner_32(new, k)
            assert isomorphic(back, m004)


def test_pachner_32_needs_valence_three(m004):
    with pytest.raises(MoveError):
        pachner_32(m004, 0)


def test_pachner_on_labeled_complex():
    tri = cycle_from_homogeneous_chain(_lens(5))
    base = labeled_invariants(tri, random_base_points(tri.num_vertices, np.random.default_rng(9)))
    new = pachner_23(tri, 0, 0)
    assert new.labels is not None and len(new) == len(tri) + 1
    after = labeled_invariants(new, random_base_points(new.num_vertices, np.random.default_rng(9)))
    assert base.reports[0].r_value.distance(after.reports[0].r_value) < 1e-9
