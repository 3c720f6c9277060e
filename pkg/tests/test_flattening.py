import cmath
import math
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from extbloch.branchlog import principal_log, r_value
from extbloch.flattening import (
    BoundaryPoint,
    DegenerateSimplexError,
    ExtParam,
    FlatTriple,
    InvalidParamError,
    InvalidTripleError,
    UnsupportedShapeError,
    component_shape,
    cross_ratio,
    edge_param,
    ell,
    from_triple,
    parity_offset,
    parity_param,
    permute_even,
    permute_odd,
)

from conftest import OMEGA, mod_dist

coord = st.floats(-4, 4, allow_nan=False)
offreal = st.builds(complex, coord, st.floats(0.02, 4) | st.floats(-4, -0.02))
shapes = offreal.filter(lambda z: abs(z) > 1e-2 and abs(1 - z) > 1e-2)
branch = st.integers(-4, 4)
params = st.builds(ExtParam, shapes, branch, branch)


def test_ell_examples():
    t = ell(ExtParam(0.5, 0, 0))
    assert (t.w0, t.w1, t.w2) == pytest.approx((-math.log(2), math.log(2), 0), abs=1e-15)
    t = ell(ExtParam(OMEGA, 0, -1))
    assert tuple(t) == pytest.approx((1j * math.pi / 3, -2j * math.pi / 3, 1j * math.pi / 3), abs=1e-15)
    # real shapes: compare with the one-sided limits taken numerically
    for side in (1, -1):
        near = complex(2, side * 1e-13)
        limit = (cmath.log(near), -cmath.log(1 - near), cmath.log(1 - near) - cmath.log(near))
        t = ell(ExtParam(2, 0, 0, side=side))
        assert tuple(t) == pytest.approx(limit, abs=1e-12)
    # from above, 1 - z approaches -1 from below the axis
    assert tuple(ell(ExtParam(2, 0, 0, side=1))) == pytest.approx(
        (math.log(2), 1j * math.pi, -1j * math.pi - math.log(2)), abs=1e-15)
    assert tuple(ell(ExtParam(2, 0, 0, side=-1))) == pytest.approx(
        (math.log(2), -1j * math.pi, 1j * math.pi - math.log(2)), abs=1e-15)


def test_param_validation():
    with pytest.raises(InvalidParamError):
        ExtParam(1, 0, 0)
    with pytest.raises(InvalidParamError):
        ExtParam(-3, 0, 0)  # real shape on a cut without a side
    assert ExtParam(0.25, 1, 1).side is None


def test_from_triple_examples():
    assert from_triple(FlatTriple(-math.log(2), math.log(2), 0)) == ExtParam(0.5, 0, 0)
    with pytest.raises(InvalidTripleError):
        from_triple(FlatTriple(0, 0, 0))
    with pytest.raises(InvalidTripleError):
        from_triple(FlatTriple(1, 1, 1))


@given(params)
def test_round_trip(prm):
    t = ell(prm)
    assert abs(t.w0 + t.w1 + t.w2) < 1e-12
    back = from_triple(t)
    assert (back.p, back.q) == (prm.p, prm.q)
    assert abs(back.z - prm.z) < 1e-12 * max(1, abs(prm.z))
    t2 = ell(back)
    assert max(abs(a - b) for a, b in zip(t, t2)) < 1e-12


@given(params)
def test_exp_of_triple(prm):
    t = ell(prm)
    assert abs(cmath.exp(t.w0) - (-1) ** prm.p * prm.z) < 1e-12 * abs(prm.z)
    assert abs(cmath.exp(-t.w1) - (-1) ** prm.q * (1 - prm.z)) < 1e-12 * abs(1 - prm.z)


def test_cross_ratio_examples():
    inf = BoundaryPoint.infinity()
    assert cross_ratio(0, inf, 1, 2) == pytest.approx(2)
    assert cross_ratio(0, 1, 2, 3) == pytest.approx(0.75)
    with pytest.raises(DegenerateSimplexError):
        cross_ratio(0, 1, 1, 3)


def _direct(z0, z1, z2, z3):
    return (z2 - z1) * (z3 - z0) / ((z2 - z0) * (z3 - z1))


@given(st.lists(st.builds(complex, coord, coord), min_size=4, max_size=4, unique=True))
def test_cross_ratio_against_formula_and_klein(pts):
    if min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]) < 1e-2:
        return
    cr = cross_ratio(*pts)
    assert cr == pytest.approx(_direct(*pts), rel=1e-10)
    for perm in ((1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)):
        assert cross_ratio(*[pts[i] for i in perm]) == pytest.approx(cr, rel=1e-10)


def test_cross_ratio_mobius_invariance(rng):
    for _ in range(100):
        pts = [BoundaryPoint.from_complex(complex(*rng.normal(size=2))) for _ in range(4)]
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        before = cross_ratio(*pts)
        after = cross_ratio(*[p.moved(g) for p in pts])
        assert abs(after - before) < 1e-12 * max(1, abs(before)) * 100


def test_boundary_point_normalized():
    p = BoundaryPoint(3 + 4j, 1)
    assert max(abs(p.a), abs(p.b)) == pytest.approx(1)
    assert p.to_complex() == pytest.approx(3 + 4j)


def test_edge_params():
    z = 0.3 + 0.8j
    t = ell(ExtParam(z, 2, -1))
    assert edge_param(t, (0, 1)) == pytest.approx(principal_log(z) + 2j * math.pi)
    assert edge_param(t, (2, 3)) == edge_param(t, (0, 1))
    t0 = ell(ExtParam(z, 0, 0))
    assert edge_param(t0, (0, 2)) == pytest.approx(principal_log(1 - z) - principal_log(z))
    assert edge_param(t0, (1, 3)) == edge_param(t0, (0, 2))
    assert edge_param(t0, (0, 3)) == edge_param(t0, (1, 2)) == t0.w1


@given(st.builds(complex, coord, st.floats(0.02, 4)), branch, branch)
def test_parity_examples(z, p, q):
    t = ell(ExtParam(z, p, q))
    assert parity_param(t, (0, 1)) == p % 2
    assert parity_param(t, (1, 2)) == q % 2
    if p == q == 0:
        assert parity_param(t, (0, 2)) == 1


@given(params)
def test_parities_sum_odd(prm):
    t = ell(prm)
    s = [parity_offset(t, k) for k in range(3)]
    assert sum(s) % 2 == 1
    prod = component_shape(prm.z, 0) * component_shape(prm.z, 1) * component_shape(prm.z, 2)
    assert prod == pytest.approx(-1, abs=1e-12)


def _chi_r(w):
    return 0.5j * math.pi * principal_log(w)


@given(params)
def test_permutation_corrections_at_r_level(prm):
    for cycle in ("012", "021"):
        new, w = permute_even(prm, cycle)
        assert mod_dist(r_value(prm) - r_value(new), _chi_r(w)) < 1e-10
    for tr in ("01", "02", "12"):
        new, w = permute_odd(prm, tr)
        assert mod_dist(r_value(prm) + r_value(new), _chi_r(w)) < 1e-10


@given(params)
def test_permutation_group_orders(prm):
    x = prm
    for _ in range(3):
        x, _ = permute_even(x, "012")
    assert (x.p, x.q) == (prm.p, prm.q) and abs(x.z - prm.z) < 1e-9 * max(1, abs(prm.z))
    y, _ = permute_even(prm, "012")
    y, _ = permute_even(y, "021")
    assert (y.p, y.q) == (prm.p, prm.q)
    for tr in ("01", "02", "12"):
        x, _ = permute_odd(prm, tr)
        x, _ = permute_odd(x, tr)
        assert (x.p, x.q) == (prm.p, prm.q)


def test_permutation_examples():
    z = 0.2 + 0.7j
    new, w = permute_even(ExtParam(z, 2, 3), "012")
    assert (new.z, new.p, new.q) == (pytest.approx(1 / (1 - z)), 3, -6)
    assert w == pytest.approx(cmath.exp(1j * math.pi / 3 + 3j * math.pi))
    new, w = permute_even(ExtParam(z, 2, 3), "021")
    assert (new.z, new.p, new.q) == (pytest.approx(1 - 1 / z), -6, 2)
    new, w = permute_odd(ExtParam(z, 2, 3), "01")
    assert (new.z, new.p, new.q) == (pytest.approx(1 / z), -2, 6)
    new, w = permute_odd(ExtParam(z, 0, 0), "02")
    assert (new.z, new.p, new.q) == (pytest.approx(1 - z), 0, 0)
    assert w == pytest.approx(cmath.exp(1j * math.pi / 3))


def test_lemma_one_minus_x(rng):
    half = 2 * r_value(ExtParam(0.5, 0, 0))
    for _ in range(50):
        z = complex(*rng.normal(size=2))
        p, q = rng.integers(-3, 4, size=2)
        lhs = r_value(ExtParam(z, p, q)) + r_value(ExtParam(1 - z, -q, -p))
        assert mod_dist(lhs, half) < 1e-10


def test_permutations_reject_real_shapes():
    with pytest.raises(UnsupportedShapeError):
        permute_even(ExtParam(0.5, 0, 0), "012")
    with pytest.raises(UnsupportedShapeError):
        permute_odd(ExtParam(3.0, 0, 0, side=1), "01")


def test_permutation_realizes_vertex_reordering():
    """The returned shape is the cross-ratio of the reordered vertices."""
    from extbloch.flattening import EVEN_PERMUTATIONS, ODD_PERMUTATIONS

    pts = [BoundaryPoint.from_complex(0), BoundaryPoint.infinity(),
           BoundaryPoint.from_complex(1), BoundaryPoint.from_complex(0.3 + 0.9j)]
    z = cross_ratio(*pts)
    for table, fn in ((EVEN_PERMUTATIONS, permute_even), (ODD_PERMUTATIONS, permute_odd)):
        for key, order in table.items():
            new, _ = fn(ExtParam(z, 0, 0), key)
            assert new.z == pytest.approx(cross_ratio(*[pts[i] for i in order]))
    # all 24 orders give only the six values z, z', z'' and their inverses
    vals = {complex(round(cross_ratio(*[pts[i] for i in o]).real, 9),
                    round(cross_ratio(*[pts[i] for i in o]).imag, 9))
            for o in permutations(range(4))}
    assert len(vals) == 6
