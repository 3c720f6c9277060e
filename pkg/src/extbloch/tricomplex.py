"""Ordered 3-cycles: tetrahedra glued along faces by order-preserving maps.

Face ``f`` of a tetrahedron is the face opposite vertex slot ``f``.  Since
gluings preserve vertex order, a gluing is fully described by the
neighbouring tetrahedron and the face it meets: the three remaining slots
are matched in increasing order.

Normal curves are stored as passes ``(tet, vertex, f_in, f_out)``: the
curve enters the tetrahedron through face ``f_in`` and leaves through
``f_out``.  Passes of a curve in a vertex link name the corner ``vertex``;
the passed edge is the one with endpoints outside ``{f_in, f_out}``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence

import numpy as np

from .flattening import EDGE_INDEX, EDGES, FlatTriple, parity_offset
from .zsolve import solve_integer


class ParseError(ValueError):
    pass


class GluingError(ValueError):
    pass


class OrientationError(ValueError):
    pass


class NotACycleError(ValueError):
    pass


class EmptyComplexError(ValueError):
    pass


class MoveError(ValueError):
    pass


class LinkError(ValueError):
    pass


def _others(f: int) -> list[int]:
    return [s for s in range(4) if s != f]


def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Pass:
    tet: int
    vertex: Optional[int]
    f_in: int
    f_out: int

    @property
    def edge(self) -> tuple[int, int]:
        a, b = (s for s in range(4) if s not in (self.f_in, self.f_out))
        return (a, b)

    def orientation(self) -> int:
        """+1 when the pass turns counterclockwise around its corner,
        measured in the tetrahedron's vertex order."""
        v = self.vertex
        w = next(s for s in self.edge if s != v)
        return -_perm_sign((v, w, self.f_out, self.f_in))

    def reversed(self) -> "Pass":
        return Pass(self.tet, self.vertex, self.f_out, self.f_in)

    def to_list(self) -> list:
        return [self.tet, self.vertex, self.f_in, self.f_out]


@dataclass(frozen=True)
class NormalCurve:
    passes: tuple[Pass, ...]

    @classmethod
    def from_lists(cls, items: Iterable[Sequence]) -> "NormalCurve":
        return cls(tuple(Pass(int(t), None if v is None else int(v), int(a), int(b))
                         for t, v, a, b in items))

    def reversed(self) -> "NormalCurve":
        return NormalCurve(tuple(p.reversed() for p in reversed(self.passes)))

    def __len__(self) -> int:
        return len(self.passes)

    def to_lists(self) -> list[list]:
        return [p.to_list() for p in self.passes]


@dataclass(frozen=True)
class EdgeClass:
    incidences: tuple[tuple[int, int, int], ...]  # (tet, tet-edge index, sign)
    loop: NormalCurve

    @property
    def valence(self) -> int:
        return len(self.incidences)


@dataclass(frozen=True)
class VertexLink:
    vertex: int
    corners: tuple[tuple[int, int], ...]  # (tet, vertex slot)
    euler_characteristic: int
    orientable: bool = True

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    @property
    def kind(self) -> str:
        if self.genus == 0:
            return "material"
        if self.genus == 1:
            return "cusp"
        return "higher-genus"


@dataclass(frozen=True)
class CuspCurves:
    vertex: int
    meridian: NormalCurve
    longitude: NormalCurve


class OrderedTriangulation:
    """A closed, orientable, quasi-simplicial ordered 3-cycle."""

    def __init__(self, neighbors: Sequence[Sequence[int]], faces: Sequence[Sequence[int]],
                 name: str = "", labels=None, cusps: Sequence[CuspCurves] = (),
                 signs: Optional[Sequence[int]] = None):
        self.name = name
        self.neighbors = tuple(tuple(int(v) for v in row) for row in neighbors)
        self.faces = tuple(tuple(int(v) for v in row) for row in faces)
        self.labels = None if labels is None else [
            [np.asarray(g, dtype=complex).reshape(2, 2) for g in tet] for tet in labels]
        self._check_gluings()
        self.signs = tuple(self._orient() if signs is None else (int(s) for s in signs))
        self._check_signs()
        self.vertex_class = self._vertex_classes()
        self.edges = self._edge_classes()
        self.edge_class_of = {}
        for k, ec in enumerate(self.edges):
            for t, e, _ in ec.incidences:
                self.edge_class_of[(t, e)] = k
        self.links = self._links()
        self.cusps = tuple(cusps)
        for c in self.cusps:
            for curve in (c.meridian, c.longitude):
                self.validate_curve(curve)

    # -- basic structure ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.neighbors)

    @property
    def num_vertices(self) -> int:
        return max(self.vertex_class.values()) + 1 if self.vertex_class else 0

    def slot_map(self, t: int, f: int) -> dict[int, int]:
        """Vertex slots of face f of tet t -> slots in the neighbour (all four)."""
        g = self.faces[t][f]
        m = dict(zip(_others(f), _others(g)))
        m[f] = g
        return m

    def gluings(self, t: int) -> list[list[int]]:
        return [_others(self.faces[t][f]) for f in range(4)]

    def _check_gluings(self):
        n = len(self.neighbors)
        if n == 0:
            raise EmptyComplexError("triangulation has no tetrahedra")
        if len(self.faces) != n:
            raise ParseError("neighbors and faces disagree in length")
        for t in range(n):
            if len(self.neighbors[t]) != 4 or len(self.faces[t]) != 4:
                raise ParseError(f"tet {t}: need four faces")
            for f in range(4):
                u, g = self.neighbors[t][f], self.faces[t][f]
                if not (0 <= u < n and 0 <= g < 4):
                    raise ParseError(f"tet {t} face {f}: index out of range")
                if (u, g) == (t, f):
                    raise GluingError(f"tet {t} face {f} is glued to itself")
                if self.neighbors[u][g] != t or self.faces[u][g] != f:
                    raise GluingError(f"tet {t} face {f}: gluing is not involutive")

    def _orient(self) -> list[int]:
        n = len(self.neighbors)
        signs = [0] * n
        for start in range(n):
            if signs[start]:
                continue
            signs[start] = 1
            queue = deque([start])
            while queue:
                t = queue.popleft()
                for f in range(4):
                    u, g = self.neighbors[t][f], self.faces[t][f]
                    want = -signs[t] * (-1) ** (f + g)
                    if signs[u] == 0:
                        signs[u] = want
                        queue.append(u)
        return signs

    def _check_signs(self):
        if len(self.signs) != len(self.neighbors):
            raise OrientationError("one sign per tetrahedron required")
        for t in range(len(self)):
            for f in range(4):
                u, g = self.neighbors[t][f], self.faces[t][f]
                if self.signs[u] != -self.signs[t] * (-1) ** (f + g):
                    raise OrientationError(
                        f"tet {t} face {f}: orientations do not cancel (not orientable)")

    def _vertex_classes(self) -> dict[tuple[int, int], int]:
        parent = {(t, v): (t, v) for t in range(len(self)) for v in range(4)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t in range(len(self)):
            for f in range(4):
                u = self.neighbors[t][f]
                for s, s2 in self.slot_map(t, f).items():
                    if s != f:
                        ra, rb = find((t, s)), find((u, s2))
                        if ra != rb:
                            parent[max(ra, rb)] = min(ra, rb)
        roots: dict = {}
        out = {}
        for key in sorted(parent):
            r = find(key)
            out[key] = roots.setdefault(r, len(roots))
        return out

    def _edge_classes(self) -> list[EdgeClass]:
        seen = set()
        classes = []
        for t in range(len(self)):
            for e, (a, b) in enumerate(EDGES):
                if (t, e) in seen:
                    continue
                c, d = _others_pair(a, b)
                start = (t, a, b, c, d)
                incid, passes = [], []
                cur = start
                for _ in range(6 * len(self) + 1):
                    tt, aa, bb, cc, dd = cur
                    ee = EDGE_INDEX[(aa, bb)]
                    if (tt, ee) in seen:
                        raise GluingError(f"edge walk revisits tet {tt} edge {EDGES[ee]}")
                    seen.add((tt, ee))
                    incid.append((tt, ee, self.signs[tt]))
                    passes.append(Pass(tt, None, dd, cc))
                    m = self.slot_map(tt, cc)
                    u = self.neighbors[tt][cc]
                    na, nb, nd = m[aa], m[bb], m[dd]
                    nc = m[cc]  # face we enter through
                    cur = (u, na, nb, nd, nc)
                    if cur == start:
                        break
                else:
                    raise GluingError(f"edge walk from tet {t} edge {EDGES[e]} does not close")
                classes.append(EdgeClass(tuple(incid), NormalCurve(tuple(passes))))
        return classes

    def _links(self) -> list[VertexLink]:
        links = []
        for v in range(self.num_vertices):
            corners = tuple(k for k, cls in sorted(self.vertex_class.items()) if cls == v)
            nv = 0
            for ec in self.edges:
                t, e, _ = ec.incidences[0]
                a, b = EDGES[e]
                nv += (self.vertex_class[(t, a)] == v) + (self.vertex_class[(t, b)] == v)
            nf = len(corners)
            chi = nv - 3 * nf // 2 + nf
            links.append(VertexLink(v, corners, chi))
        return links

    # -- normal curves -----------------------------------------------------

    def validate_curve(self, curve: NormalCurve):
        if not curve.passes:
            raise GluingError("empty normal curve")
        n = len(curve.passes)
        for k, p in enumerate(curve.passes):
            if not 0 <= p.tet < len(self) or p.f_in == p.f_out:
                raise GluingError(f"pass {k} is malformed")
            if p.vertex is not None and p.vertex in (p.f_in, p.f_out):
                raise GluingError(f"pass {k}: corner lies on a crossed face")
            nxt = curve.passes[(k + 1) % n]
            u, g = self.neighbors[p.tet][p.f_out], self.faces[p.tet][p.f_out]
            if (u, g) != (nxt.tet, nxt.f_in):
                raise GluingError(f"pass {k} does not lead to pass {(k + 1) % n}")
            if p.vertex is not None and self.slot_map(p.tet, p.f_out)[p.vertex] != nxt.vertex:
                raise GluingError(f"pass {k}: corner does not continue")

    def curve_terms(self, curve: NormalCurve) -> list[tuple[int, int, int]]:
        """(tet, triple component, coefficient) for each pass.

        Corner passes carry their counterclockwise sign; passes without a
        corner (edge loops) carry the tetrahedron's sign.
        """
        out = []
        for p in curve.passes:
            comp = _component(p.edge)
            if p.vertex is None:
                coef = self.signs[p.tet]
            else:
                # counterclockwise in the orientation of K, times epsilon
                coef = (p.orientation() * self.signs[p.tet]) * self.signs[p.tet]
            out.append((p.tet, comp, coef))
        return out

    def edge_loops(self) -> list[NormalCurve]:
        return [ec.loop for ec in self.edges]

    def dual_cycles(self) -> list[NormalCurve]:
        """Fundamental cycles of the face-pairing graph, as normal curves."""
        n = len(self)
        parent: dict[int, Optional[tuple[int, int]]] = {0: None}  # tet -> (parent tet, face in parent)
        depth = {0: 0}
        tree = set()
        queue = deque([0])
        order = []
        while queue:
            t = queue.popleft()
            order.append(t)
            for f in range(4):
                u, g = self.neighbors[t][f], self.faces[t][f]
                if u not in parent:
                    parent[u] = (t, f)
                    depth[u] = depth[t] + 1
                    tree.add((t, f))
                    tree.add((u, g))
                    queue.append(u)
        cycles = []
        done = set()
        for t in range(n):
            for f in range(4):
                u, g = self.neighbors[t][f], self.faces[t][f]
                if (t, f) in tree or (t, f) in done:
                    continue
                done.add((t, f))
                done.add((u, g))
                cycles.append(self._close_dual_cycle(t, f, u, g, parent, depth))
        return cycles

    def _close_dual_cycle(self, t, f, u, g, parent, depth) -> NormalCurve:
        # crossings: (from tet, face) ... a closed walk t -f-> u -> tree -> t
        def up(x):
            pt, pf = parent[x]
            return pt, self.faces[pt][pf], pf  # parent, face of x, face of parent

        path_up, path_down = [], []  # from u up, and from t up
        a, b = u, t
        while a != b:
            if depth[a] >= depth[b]:
                pt, fx, pf = up(a)
                path_up.append((a, fx))
                a = pt
            else:
                pt, fx, pf = up(b)
                path_down.append((pt, parent[b][1]))
                b = pt
        crossings = [(t, f)] + path_up + list(reversed(path_down))
        passes = []
        k = len(crossings)
        for i in range(k):
            tet, out_face = crossings[i]
            prev_tet, prev_face = crossings[i - 1]
            in_face = self.faces[prev_tet][prev_face]
            assert self.neighbors[prev_tet][prev_face] == tet
            passes.append(Pass(tet, None, in_face, out_face))
        return NormalCurve(tuple(passes))

    def normal_loop_basis(self) -> list[NormalCurve]:
        return self.dual_cycles() + self.edge_loops()

    # -- links and cusp curves ----------------------------------------------

    def _link_sides(self, v: int):
        """Oriented side identifications of the link of vertex class v."""
        sides = []
        index = {}
        for (t, s) in self.links[v].corners:
            for f in _others(s):
                key = (t, s, f)
                if key in index:
                    continue
                m = self.slot_map(t, f)
                other = (self.neighbors[t][f], m[s], self.faces[t][f])
                index[key] = (len(sides), 1)
                index[other] = (len(sides), -1)
                sides.append((key, other))
        return sides, index

    def _link_curve_vector(self, curve: NormalCurve, index) -> list[int]:
        vec = [0] * (max(i for i, _ in index.values()) + 1)
        for p in curve.passes:
            i, s = index[(p.tet, p.vertex, p.f_out)]
            vec[i] += s
        return vec

    def link_cycles(self, v: int) -> list[NormalCurve]:
        """Fundamental cycles of the dual graph of the link of v."""
        corners = self.links[v].corners
        root = corners[0]
        parent = {root: None}
        depth = {root: 0}
        queue = deque([root])
        tree = set()
        while queue:
            t, s = queue.popleft()
            for f in _others(s):
                u, g = self.neighbors[t][f], self.faces[t][f]
                nxt = (u, self.slot_map(t, f)[s])
                if nxt not in parent:
                    parent[nxt] = (t, s, f)
                    depth[nxt] = depth[(t, s)] + 1
                    tree.add((t, s, f))
                    tree.add((u, nxt[1], g))
                    queue.append(nxt)
        cycles = []
        done = set()
        for (t, s) in corners:
            for f in _others(s):
                if (t, s, f) in tree or (t, s, f) in done:
                    continue
                u, g = self.neighbors[t][f], self.faces[t][f]
                s2 = self.slot_map(t, f)[s]
                done.add((t, s, f))
                done.add((u, s2, g))
                # walk: (t,s) -f-> (u,s2) -> tree path -> (t,s)
                crossings = [(t, s, f)]
                a, b = (u, s2), (t, s)
                up_a, up_b = [], []
                while a != b:
                    if depth[a] >= depth[b]:
                        pt, ps, pf = parent[a]
                        up_a.append((a[0], a[1], self.faces[pt][pf]))
                        a = (pt, ps)
                    else:
                        pt, ps, pf = parent[b]
                        up_b.append((pt, ps, pf))
                        b = (pt, ps)
                crossings += up_a + list(reversed(up_b))
                passes = []
                for i, (tt, ss, out_face) in enumerate(crossings):
                    pt, ps, pf = crossings[i - 1]
                    passes.append(Pass(tt, ss, self.faces[pt][pf], out_face))
                cycles.append(NormalCurve(tuple(passes)))
        return cycles

    def vertex_loops(self, v: int) -> list[NormalCurve]:
        """Small loops in the link of v around each edge end at v."""
        loops = []
        for ec in self.edges:
            for end in (0, 1):
                passes = []
                for p in ec.loop.passes:
                    corner = p.edge[end]
                    passes.append(Pass(p.tet, corner, p.f_in, p.f_out))
                if self.vertex_class[(passes[0].tet, passes[0].vertex)] == v:
                    loops.append(NormalCurve(tuple(passes)))
        return loops

    def default_cusp_basis(self, v: int) -> CuspCurves:
        link = self.links[v]
        if link.genus != 1:
            raise LinkError(f"link of vertex {v} has genus {link.genus}, not a torus")
        _, index = self._link_sides(v)
        cycles = self.link_cycles(v)
        vecs = [self._link_curve_vector(c, index) for c in cycles]
        bounds = [self._link_curve_vector(c, index) for c in self.vertex_loops(v)]
        ordered = sorted(range(len(cycles)), key=lambda i: (len(cycles[i]), i))
        pairs = sorted(combinations(ordered, 2),
                       key=lambda ij: (len(cycles[ij[0]]) + len(cycles[ij[1]]), ij))
        for i, j in pairs:
            gens = bounds + [vecs[i], vecs[j]]
            cols = [list(r) for r in zip(*gens)]
            if all(solve_integer(cols, target) is not None for target in vecs):
                return CuspCurves(v, cycles[i], cycles[j])
        raise LinkError(f"no homology basis found for the link of vertex {v}")

    def cusp_basis(self, v: int) -> CuspCurves:
        for c in self.cusps:
            if c.vertex == v:
                return c
        return self.default_cusp_basis(v)

    def is_link_nontrivial(self, curve: NormalCurve, v: int) -> bool:
        """False when the curve bounds in the link (a combination of vertex loops)."""
        _, index = self._link_sides(v)
        bounds = [self._link_curve_vector(c, index) for c in self.vertex_loops(v)]
        vec = self._link_curve_vector(curve, index)
        cols = [list(r) for r in zip(*bounds)]
        return solve_integer(cols, vec) is None

    # -- holonomy ------------------------------------------------------------

    def log_holonomy(self, curve: NormalCurve, flats: Sequence[FlatTriple]) -> complex:
        return sum((c * flats[t][k] for t, k, c in self.curve_terms(curve)), 0j)

    def parity_along(self, curve: NormalCurve, flats: Sequence[FlatTriple]) -> int:
        return sum(parity_offset(flats[p.tet], _component(p.edge)) for p in curve.passes) % 2

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {"name": self.name,
               "tetrahedra": [{"neighbors": list(self.neighbors[t]), "gluings": self.gluings(t)}
                              for t in range(len(self))]}
        if self.labels is not None:
            doc["labels"] = [[[[float(x.real), float(x.imag)] for x in g.ravel()] for g in tet]
                             for tet in self.labels]
        if self.cusps:
            doc["cusps"] = [{"vertex": c.vertex, "meridian": c.meridian.to_lists(),
                             "longitude": c.longitude.to_lists()} for c in self.cusps]
        return doc


def _others_pair(a: int, b: int) -> tuple[int, int]:
    c, d = (s for s in range(4) if s not in (a, b))
    return c, d


def _component(edge: tuple[int, int]) -> int:
    return (0, 2, 1, 1, 2, 0)[EDGE_INDEX[tuple(sorted(edge))]]


# ---------------------------------------------------------------------------
# documents


def from_dict(doc: dict) -> OrderedTriangulation:
    try:
        tets = doc["tetrahedra"]
        neighbors, faces = [], []
        for t, tet in enumerate(tets):
            nb, gl = tet["neighbors"], tet["gluings"]
            if len(nb) != 4 or len(gl) != 4:
                raise ParseError(f"tet {t}: need four neighbors and four gluings")
            face_row = []
            for f in range(4):
                img = [int(x) for x in gl[f]]
                if len(img) != 3 or len(set(img)) != 3 or not all(0 <= x < 4 for x in img):
                    raise ParseError(f"tet {t} face {f}: gluing must list three distinct slots")
                if img != sorted(img):
                    raise GluingError(
                        f"tet {t} face {f}: gluing {img} does not preserve the vertex order")
                face_row.append(next(s for s in range(4) if s not in img))
            neighbors.append([int(x) for x in nb])
            faces.append(face_row)
        labels = doc.get("labels")
        if labels is not None:
            labels = [[[complex(re, im) for re, im in g] for g in tet] for tet in labels]
        cusps = [CuspCurves(int(c["vertex"]), NormalCurve.from_lists(c["meridian"]),
                            NormalCurve.from_lists(c["longitude"]))
                 for c in doc.get("cusps", [])]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ParseError, GluingError)):
            raise
        raise ParseError(f"malformed document: {exc}") from exc
    return OrderedTriangulation(neighbors, faces, name=doc.get("name", ""), labels=labels,
                                cusps=cusps)


def parse(text: str) -> OrderedTriangulation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    return from_dict(doc)


def bundled(name: str = "m004") -> OrderedTriangulation:
    """One of the documents shipped in ``extbloch/data``."""
    from importlib import resources

    res = resources.files("extbloch") / "data" / f"{name}.tri.json"
    if not res.is_file():
        raise ParseError(f"no bundled document named {name!r}")
    return parse(res.read_text(encoding="utf-8"))


def serialize(tri: OrderedTriangulation) -> str:
    """Canonical text: one line per tetrahedron, label block and curve."""
    doc = tri.to_dict()

    def block(items, indent="  "):
        return "[\n" + ",\n".join(indent + json.dumps(x) for x in items) + "\n ]"

    parts = [f' "name": {json.dumps(doc["name"])}', f' "tetrahedra": {block(doc["tetrahedra"])}']
    if "labels" in doc:
        parts.append(f' "labels": {block(doc["labels"])}')
    if "cusps" in doc:
        parts.append(f' "cusps": {block(doc["cusps"])}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


# ---------------------------------------------------------------------------
# homogeneous chains


def _same_orbit(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    """Equal up to a common left multiplication, each entry up to sign."""
    ia, ib = np.linalg.inv(a[0]), np.linalg.inv(b[0])
    for ga, gb in zip(a[1:], b[1:]):
        x, y = ia @ ga, ib @ gb
        scale = tol * (1 + np.abs(x).max())
        if np.abs(x - y).max() > scale and np.abs(x + y).max() > scale:
            return False
    return True


def cycle_from_homogeneous_chain(chain: Sequence[tuple[int, Sequence]], name: str = "",
                                 tol: float = 1e-9) -> OrderedTriangulation:
    """Glue the simplices of a homogeneous 3-cycle along cancelling faces."""
    simplices: list[list] = []  # [coef, labels]
    for sign, labels in chain:
        labels = [np.asarray(g, dtype=complex).reshape(2, 2) for g in labels]
        if len(labels) != 4:
            raise ValueError("homogeneous 3-simplices have four labels")
        for entry in simplices:
            if _same_orbit(entry[1], labels, tol):
                entry[0] += int(sign)
                break
        else:
            simplices.append([int(sign), labels])
    tets = []
    for coef, labels in simplices:
        tets.extend([(1 if coef > 0 else -1, labels)] * abs(coef))
    if not tets:
        raise EmptyComplexError("chain cancels to zero; no tetrahedra")
    faces = []
    for k, (sign, labels) in enumerate(tets):
        for i in range(4):
            faces.append((k, i, sign * (-1) ** i, [g for j, g in enumerate(labels) if j != i]))
    match: dict[tuple[int, int], tuple[int, int]] = {}
    for a, (k, i, s, lab) in enumerate(faces):
        if (k, i) in match:
            continue
        for k2, i2, s2, lab2 in faces[a + 1:]:
            if (k2, i2) in match or s2 != -s:
                continue
            if _same_orbit(lab, lab2, tol):
                match[(k, i)] = (k2, i2)
                match[(k2, i2)] = (k, i)
                break
        else:
            raise NotACycleError(f"face {i} of simplex {k} has no cancelling partner")
    n = len(tets)
    neighbors = [[match[(k, i)][0] for i in range(4)] for k in range(n)]
    face_idx = [[match[(k, i)][1] for i in range(4)] for k in range(n)]
    return OrderedTriangulation(neighbors, face_idx, name=name,
                                labels=[labels for _, labels in tets],
                                signs=[s for s, _ in tets])


def coboundary(tri: OrderedTriangulation, tau: Sequence) -> OrderedTriangulation:
    """Right-multiply each label by tau of its vertex class."""
    if tri.labels is None:
        raise ValueError("triangulation has no labels")
    tau = [np.asarray(g, dtype=complex).reshape(2, 2) for g in tau]
    labels = [[g @ tau[tri.vertex_class[(t, s)]] for s, g in enumerate(tet)]
              for t, tet in enumerate(tri.labels)]
    return OrderedTriangulation(tri.neighbors, tri.faces, tri.name, labels, tri.cusps, tri.signs)


# ---------------------------------------------------------------------------
# Pachner moves


def _transport_label(src_labels, dst_labels, tol=1e-9):
    """h with h @ src[i] = +-dst[i] for the paired lists."""
    h = dst_labels[0] @ np.linalg.inv(src_labels[0])
    for s, d in zip(src_labels[1:], dst_labels[1:]):
        x = h @ s
        if min(np.abs(x - d).max(), np.abs(x + d).max()) > tol * (1 + np.abs(d).max()):
            raise MoveError("labels on the shared face do not agree")
    return h


def _rebuild(tri: OrderedTriangulation, removed: list[int], new_tets, external, internal,
             new_signs, new_labels, name_suffix: str) -> OrderedTriangulation:
    """Assemble a triangulation after replacing ``removed`` tets.

    ``new_tets`` is a list of vertex tuples (symbols in global order);
    ``external`` maps (old tet, old face) -> (new tet index, face);
    ``internal`` lists glued pairs between new tets.
    """
    keep = [t for t in range(len(tri)) if t not in removed]
    renum = {t: i for i, t in enumerate(keep)}
    base = len(keep)
    n = base + len(new_tets)
    neighbors = [[None] * 4 for _ in range(n)]
    faces = [[None] * 4 for _ in range(n)]

    def loc(t, f):
        if t in renum:
            return renum[t], f
        k, g = external[(t, f)]
        return base + k, g

    for t in range(len(tri)):
        for f in range(4):
            if t not in renum and (t, f) not in external:
                continue  # internal face of the removed configuration
            a = loc(t, f)
            b = loc(tri.neighbors[t][f], tri.faces[t][f])
            neighbors[a[0]][a[1]], faces[a[0]][a[1]] = b
    for (k1, f1), (k2, f2) in internal:
        neighbors[base + k1][f1], faces[base + k1][f1] = base + k2, f2
        neighbors[base + k2][f2], faces[base + k2][f2] = base + k1, f1
    signs = [tri.signs[t] for t in keep] + list(new_signs)
    labels = None
    if tri.labels is not None:
        labels = [tri.labels[t] for t in keep] + list(new_labels)
    return OrderedTriangulation(neighbors, faces, name=(tri.name + name_suffix), labels=labels,
                                signs=signs)


def pachner_23(tri: OrderedTriangulation, tet: int, face: int) -> OrderedTriangulation:
    """Replace the two tetrahedra meeting at a face by three around a new edge."""
    A, i = tet, face
    B, j = tri.neighbors[A][i], tri.faces[A][i]
    if A == B:
        raise MoveError("2-3 move needs two distinct tetrahedra across the face")
    m = tri.slot_map(A, i)
    fa = _others(i)  # face vertices as A-slots, in order
    # global order: face vertices F0<F1<F2 with apex a in gap i and apex b in gap j
    order: list = []
    for k in range(4):
        if k == i:
            order.append("a")
        if k == j:
            order.append("b")
        if k < 3:
            order.append(("F", k))
    pos = {sym: p for p, sym in enumerate(order)}
    slot_a = {("F", k): fa[k] for k in range(3)}
    slot_a["a"] = i
    slot_b = {("F", k): m[fa[k]] for k in range(3)}
    slot_b["b"] = j
    s = tri.signs[A] * (-1) ** pos["b"]
    if tri.signs[B] != s * (-1) ** pos["a"]:
        raise MoveError("tetrahedra across the face have inconsistent orientations")
    new_tets = [[sym for sym in order if sym != ("F", k)] for k in range(3)]
    external = {}
    for k in range(3):
        verts = new_tets[k]
        external[(A, slot_a[("F", k)])] = (k, verts.index("b"))
        external[(B, slot_b[("F", k)])] = (k, verts.index("a"))
    internal = []
    for k, l in combinations(range(3), 2):
        internal.append(((k, new_tets[k].index(("F", l))), (l, new_tets[l].index(("F", k)))))
    new_signs = [-s * (-1) ** pos[("F", k)] for k in range(3)]
    new_labels = []
    if tri.labels is not None:
        la, lb = tri.labels[A], tri.labels[B]
        h = _transport_label([lb[slot_b[("F", k)]] for k in range(3)],
                             [la[slot_a[("F", k)]] for k in range(3)])
        lab = {sym: la[slot_a[sym]] for sym in slot_a}
        lab["b"] = h @ lb[j]
        new_labels = [[lab[sym] for sym in verts] for verts in new_tets]
    return _rebuild(tri, [A, B], new_tets, external, internal, new_signs, new_labels, "+23")


def pachner_32(tri: OrderedTriangulation, edge_class: int) -> OrderedTriangulation:
    """Replace three tetrahedra around a valence-3 edge by two."""
    ec = tri.edges[edge_class]
    if ec.valence != 3:
        raise MoveError(f"edge class {edge_class} has valence {ec.valence}, not 3")
    tets = [t for t, _, _ in ec.incidences]
    if len(set(tets)) != 3:
        raise MoveError("3-2 move needs three distinct tetrahedra")
    passes = ec.loop.passes
    # tet i contains X, Y and the points P[i-1] (opposite its exit face) and P[i]
    sym = []  # per tet: slot -> symbol
    for i, p in enumerate(passes):
        a, b = p.edge
        sym.append({a: "X", b: "Y", p.f_out: ("P", (i - 1) % 3), p.f_in: ("P", i)})
    # relations from each tet's vertex order
    rel = set()
    for i in range(3):
        seq = [sym[i][s] for s in range(4)]
        for x, y in combinations(seq, 2):
            rel.add((x, y))
    symbols = ["X", "Y", ("P", 0), ("P", 1), ("P", 2)]
    order = None
    for cand in permutations(symbols):
        if all(((x, y) in rel) <= (cand.index(x) < cand.index(y)) for x in symbols for y in symbols
               if x != y):
            order = list(cand)
            break
    if order is None:
        raise MoveError("tetrahedra around the edge admit no common vertex order")
    pos = {s_: k for k, s_ in enumerate(order)}
    s = tri.signs[tets[0]] * (-1) ** pos[("P", 1)]
    for i in range(3):
        if tri.signs[tets[i]] != s * (-1) ** pos[("P", (i + 1) % 3)]:
            raise MoveError("inconsistent orientations around the edge")
    new_tets = [[x for x in order if x != "Y"], [x for x in order if x != "X"]]
    external = {}
    for i, t in enumerate(tets):
        inv = {v: k for k, v in sym[i].items()}
        missing = ("P", (i + 1) % 3)
        external[(t, inv["Y"])] = (0, new_tets[0].index(missing))
        external[(t, inv["X"])] = (1, new_tets[1].index(missing))
    internal = [((0, new_tets[0].index("X")), (1, new_tets[1].index("Y")))]
    new_signs = [-s * (-1) ** pos["Y"], -s * (-1) ** pos["X"]]
    new_labels = []
    if tri.labels is not None:
        lab = {}
        base_inv = {v: k for k, v in sym[0].items()}
        l0 = tri.labels[tets[0]]
        for key, slot in base_inv.items():
            lab[key] = l0[slot]
        inv1 = {v: k for k, v in sym[1].items()}
        shared = ["X", "Y", ("P", 0)]
        h = _transport_label([tri.labels[tets[1]][inv1[x]] for x in shared],
                             [lab[x] for x in shared])
        lab[("P", 1)] = h @ tri.labels[tets[1]][inv1[("P", 1)]]
        new_labels = [[lab[x] for x in verts] for verts in new_tets]
    return _rebuild(tri, tets, new_tets, external, internal, new_signs, new_labels, "+32")


def isomorphic(t1: OrderedTriangulation, t2: OrderedTriangulation) -> bool:
    """Order-preserving combinatorial isomorphism (tets relabelled only)."""
    if len(t1) != len(t2):
        return False
    for start in range(len(t2)):
        phi = {0: start}
        queue = deque([0])
        ok = True
        while queue and ok:
            t = queue.popleft()
            for f in range(4):
                u, g = t1.neighbors[t][f], t1.faces[t][f]
                u2, g2 = t2.neighbors[phi[t]][f], t2.faces[phi[t]][f]
                if g != g2:
                    ok = False
                    break
                if u in phi:
                    if phi[u] != u2:
                        ok = False
                        break
                else:
                    phi[u] = u2
                    queue.append(u)
        if ok and len(set(phi.values())) == len(t1):
            return True
    return False
