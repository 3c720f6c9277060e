"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary (and directly with ``-s``).
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import sympy

from extbloch.branchlog import r_value
from extbloch.ebloch import (
    BlochSum,
    chi,
    five_term_instance,
    nu_vanishes,
    r_congruent,
    r_of_sum,
    verify_five_term_geometric,
)
from extbloch.flatten_solver import (
    FlatteningSolution,
    beta_hat,
    build_flattening_system,
    kernel_moves,
    solve_flattening,
)
from extbloch.flattening import ExtParam, permute_even, permute_odd
from extbloch.invariants import (
    _lens_complex,
    bloch_wigner_volume,
    labeled_invariants_seeded,
    lens_space_class,
    manifold_invariants,
    rotation,
)
from extbloch.shapes import Filling
from extbloch.tricomplex import bundled, coboundary, pachner_23
from extbloch.zsolve import hermite_normal_form, matmul, matvec, solve_integer

from conftest import ACCEPTANCE, OMEGA, PI2, mod_dist

GOLDEN_VOLUME = 2.029883212819306


@contextmanager
def criterion(n: int, title: str):
    detail = {}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE[n] = (False, title)
        print(f"\ncriterion {n}: FAIL  {title}")
        raise
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    line = f"{title} ({extra})" if extra else title
    ACCEPTANCE[n] = (True, line)
    print(f"\ncriterion {n}: PASS  {line}")


def test_criterion_1_figure_eight_golden():
    with criterion(1, "m004 volume, cs and beta") as d:
        tri = bundled("m004")
        t0 = time.perf_counter()
        rep = manifold_invariants(tri).reports[0]
        elapsed = time.perf_counter() - t0
        assert abs(rep.volume - GOLDEN_VOLUME) < 1e-9
        assert mod_dist(rep.cs) < 1e-9
        expected = (BlochSum.of(ExtParam(OMEGA, 0, -1))
                    - BlochSum.of(ExtParam(OMEGA.conjugate(), 0, 1)))
        assert r_congruent(rep.beta, expected, 1e-9)
        assert elapsed < 1.0
        d["volume"] = f"{rep.volume:.15f}"
        d["seconds"] = f"{elapsed:.3f}"


def test_criterion_2_flattening_family(m004, m004_complete, filled_runs):
    with criterion(2, "flattening family identities") as d:
        (p, q), (r, s) = solve_flattening(m004, m004_complete).pq
        assert q == -1 - 2 * p and (r, s) == (-p, -q)
        for (a, b), run in filled_runs.items():
            f = Filling(a, b)
            (p, q), (r, s) = run.solution.pq
            g, dl = f.gamma, f.delta
            assert q == g - 1 - 2 * p
            assert r == -2 * dl - p
            assert s == -g + 4 * dl + 1 + 2 * p
        d["fillings"] = len(filled_runs)


def test_criterion_3_dehn_cross_check(m004):
    with criterion(3, "filled invariants: both formulas agree") as d:
        t0 = time.perf_counter()
        worst = 0.0
        for a, b in ((5, 1), (1, 2), (6, 1)):
            run = manifold_invariants(m004, {0: Filling(a, b)}, method="both")
            direct, corrected = run.reports
            gap = direct.r_value.distance(corrected.r_value)
            assert gap < 1e-9
            bw = bloch_wigner_volume(run.shapes, m004.signs)
            assert abs(direct.volume - bw) < 1e-9
            worst = max(worst, gap)
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0
        d["max gap"] = f"{worst:.1e}"
        d["seconds"] = f"{elapsed:.3f}"


def test_criterion_4_lens_torsion():
    with criterion(4, "lens spaces give pi^2/n") as d:
        t0 = time.perf_counter()
        worst = 0.0
        for n in range(2, 8):
            _, rep = lens_space_class(n)
            err = mod_dist(rep.r_value.real + 1j * rep.r_value.imag, PI2 / n)
            assert err < 1e-9
            worst = max(worst, err)
        elapsed = time.perf_counter() - t0
        assert elapsed < 2.0
        d["max residual"] = f"{worst:.1e}"
        d["seconds"] = f"{elapsed:.3f}"


def test_criterion_5_five_term_suite():
    with criterion(5, "1000 lifted five-term instances") as d:
        rng = np.random.default_rng(2024)
        worst, disagree = 0.0, 0
        for _ in range(1000):
            y = complex(rng.uniform(-2, 2), rng.uniform(0.05, 3))
            a, b = rng.uniform(0.02, 0.98, size=2)
            if a + b >= 0.98:
                a, b = 0.98 - b, 0.98 - a
            inst = five_term_instance(a + b * y, y, *[int(v) for v in rng.integers(-3, 4, size=5)])
            worst = max(worst, mod_dist(inst.bloch_sum().r_sum()))
            disagree += nu_vanishes(inst) != verify_five_term_geometric(inst.points(), inst.flats())
        assert worst < 1e-9
        assert disagree == 0
        d["max residual"] = f"{worst:.1e}"


def _chi_r(w):
    return 0.5j * math.pi * complex(np.log(complex(w)))


def test_criterion_6_identity_suite():
    with criterion(6, "transfer, 1-x identity, permutations, R of chi") as d:
        rng = np.random.default_rng(6)
        worst = 0.0

        def rand_param():
            z = complex(*rng.normal(scale=1.5, size=2))
            while abs(z.imag) < 1e-3:
                z = complex(*rng.normal(scale=1.5, size=2))
            p, q = (int(v) for v in rng.integers(-5, 6, size=2))
            return z, p, q

        for _ in range(200):
            z, p, q = rand_param()
            p2, q2 = (int(v) for v in rng.integers(-5, 6, size=2))
            lhs = r_value(ExtParam(z, p, q)) + r_value(ExtParam(z, p2, q2))
            rhs = r_value(ExtParam(z, p, q2)) + r_value(ExtParam(z, p2, q))
            worst = max(worst, abs(lhs - rhs))
        for _ in range(200):
            z, p, q = rand_param()
            lhs = r_value(ExtParam(z, p, q)) + r_value(ExtParam(1 - z, -q, -p))
            worst = max(worst, mod_dist(lhs, -PI2 / 6))
        for _ in range(200):
            prm = ExtParam(*rand_param())
            for cycle in ("012", "021"):
                new, w = permute_even(prm, cycle)
                worst = max(worst, mod_dist(r_value(prm) - r_value(new), _chi_r(w)))
            for tr in ("01", "02", "12"):
                new, w = permute_odd(prm, tr)
                worst = max(worst, mod_dist(r_value(prm) + r_value(new), _chi_r(w)))
        for _ in range(200):
            w = complex(*rng.normal(scale=2, size=2))
            worst = max(worst, mod_dist(r_of_sum(chi(w)).real + 1j * r_of_sum(chi(w)).imag, _chi_r(w)))
        assert worst < 1e-10
        d["max residual"] = f"{worst:.1e}"


def test_criterion_7_invariance_suite(m004, m004_complete):
    with criterion(7, "reseeding, coboundary, kernel moves, 2-3 move") as d:
        worst = 0.0
        tri = _lens_complex(5, np.random.default_rng(3))
        base = labeled_invariants_seeded(tri, 0).reports[0].r_value
        worst = max(worst, base.distance(labeled_invariants_seeded(tri, 17).reports[0].r_value))
        tau = [rotation(0.37)] * tri.num_vertices
        worst = max(worst, base.distance(labeled_invariants_seeded(coboundary(tri, tau), 0).reports[0].r_value))

        sol = solve_flattening(m004, m004_complete)
        r0 = beta_hat(m004, m004_complete, sol).r_sum()
        moves = kernel_moves(m004, m004_complete)
        rows, rhs, _ = build_flattening_system(m004, m004_complete)
        rng = np.random.default_rng(7)
        for _ in range(5):
            coef = rng.integers(-3, 4, size=len(moves))
            x = np.array(sol.vector) + sum(int(c) * np.array(m) for c, m in zip(coef, moves))
            assert matvec(rows, [int(v) for v in x]) == list(rhs)
            pq = [(int(x[2 * t]), int(x[2 * t + 1])) for t in range(len(m004))]
            worst = max(worst, mod_dist(beta_hat(m004, m004_complete, FlatteningSolution(pq)).r_sum(), r0))

        before = manifold_invariants(m004).reports[0].r_value
        after = manifold_invariants(pachner_23(m004, 0, 0)).reports[0].r_value
        worst = max(worst, before.distance(after))
        assert worst < 1e-9
        d["max change"] = f"{worst:.1e}"


def test_criterion_8_integer_kernel():
    with criterion(8, "planted integer systems and HNF unimodularity") as d:
        rng = np.random.default_rng(8)
        for _ in range(500):
            m, n = int(rng.integers(1, 6)), int(rng.integers(1, 7))
            a = rng.integers(-5, 6, size=(m, n)).tolist()
            b = matvec(a, rng.integers(-4, 5, size=n).tolist())
            sol = solve_integer(a, b, n)
            assert sol is not None
            x0, kernel = sol
            assert matvec(a, x0) == b
            for k in kernel:
                assert matvec(a, k) == [0] * m
            h, u = hermite_normal_form(a, n)
            assert matmul(u, a) == h
            assert abs(sympy.Matrix(u).det()) == 1
        d["systems"] = 500
