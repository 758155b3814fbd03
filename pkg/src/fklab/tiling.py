"""111-interface geometry: projection onto the triangular lattice, rhombus
typing, the tiling <-> interface bijection through height functions, exhaustive
tiling enumeration, and rhombus-configuration bookkeeping for interfaces that
are not minimal (overlap numbers, delta/omega edges, lambda links).

Plane conventions
-----------------
Integer points of the 3D lattice (the corners of dual faces) are mapped to the
plane by the exact integer-linear projection ``phi(v) = (v1 - v3, v2 - v3)``,
which identifies points differing by (1,1,1).  Under phi the projected lattice
is the triangular lattice in axial coordinates; the six unit directions are
(1,0), (0,1), (-1,-1) and their negatives.  The class of a plane vertex is
``(a + b) mod 3`` and equals the coordinate sum mod 3 of any preimage.

A face dual to the bond (k, k + e_mu) has corners with coordinate sums
K+1, K+2, K+2, K+3 (K = k1+k2+k3); its level is n(f) = K + 2 and its projected
rhombus consists of the two triangles flanking the projection of the low-high
corner diagonal.  The rhombus type is n(f) mod 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .classical import Face, face_vertices
from .lattice import Site, SpinConfiguration, Volume, coordinate_sum

PlaneVertex = tuple[int, int]
Triangle = frozenset  # of 3 PlaneVertex
Rhombus = frozenset   # of 2 Triangle

#: Plane directions with height increment +1 (projections of +e1, +e2, +e3).
UP_DIRS = ((1, 0), (0, 1), (-1, -1))
DOWN_DIRS = ((-1, 0), (0, -1), (1, 1))
ALL_DIRS = UP_DIRS + DOWN_DIRS


def phi(v: Sequence[int]) -> PlaneVertex:
    """Exact projection of an integer 3D point along (1,1,1)."""
    return (v[0] - v[2], v[1] - v[2])


def vertex_class(p: PlaneVertex) -> int:
    return (p[0] + p[1]) % 3


def lift_vertex(p: PlaneVertex, level: int) -> tuple[int, int, int]:
    """The unique preimage of ``p`` with coordinate sum ``level``.

    Requires level % 3 == vertex_class(p).
    """
    a, b = p
    if (level - a - b) % 3:
        raise ValueError("level incompatible with vertex class")
    v3 = (level - a - b) // 3
    return (a + v3, b + v3, v3)


def stair_height(p: PlaneVertex) -> int:
    """Height of the perfect staircase (the all-type-0 interface) above ``p``."""
    return (0, 1, -1)[vertex_class(p)]


def tri_up(a: int, b: int) -> Triangle:
    return frozenset(((a, b), (a + 1, b), (a + 1, b + 1)))


def tri_dn(a: int, b: int) -> Triangle:
    return frozenset(((a, b), (a, b + 1), (a + 1, b + 1)))


def triangles_at_vertex(p: PlaneVertex) -> list[Triangle]:
    a, b = p
    return [
        tri_up(a, b), tri_up(a - 1, b), tri_up(a - 1, b - 1),
        tri_dn(a, b), tri_dn(a, b - 1), tri_dn(a - 1, b - 1),
    ]


def triangles_of_edge(e: Iterable[PlaneVertex]) -> list[Triangle]:
    """The (at most two) elementary triangles having segment ``e`` as a side."""
    es = frozenset(e)
    out = []
    for p in es:
        for t in triangles_at_vertex(p):
            if es <= t and t not in out:
                out.append(t)
    return out


def triangle_edges(t: Triangle) -> list[frozenset]:
    vs = sorted(t)
    return [frozenset((vs[0], vs[1])), frozenset((vs[0], vs[2])), frozenset((vs[1], vs[2]))]


def rhombus_of(t1: Triangle, t2: Triangle) -> Rhombus:
    shared = t1 & t2
    if len(shared) != 2:
        raise ValueError("triangles do not share an edge")
    return frozenset((t1, t2))


def rhombus_shared_edge(r: Rhombus) -> frozenset:
    t1, t2 = tuple(r)
    return t1 & t2


def rhombus_type(r: Rhombus) -> int:
    """Type tau in {0,1,2}: the vertex class absent from the shared edge."""
    p, q = tuple(rhombus_shared_edge(r))
    return (3 - vertex_class(p) - vertex_class(q)) % 3


def rhombus_orientation(r: Rhombus) -> int:
    """Orientation index in {0,1,2}: the axis family of the shared edge."""
    p, q = tuple(rhombus_shared_edge(r))
    d = (q[0] - p[0], q[1] - p[1])
    if d[0] and not d[1]:
        return 0
    if d[1] and not d[0]:
        return 1
    return 2


def rhombus_corners(r: Rhombus) -> tuple[PlaneVertex, ...]:
    """The four boundary corners in cyclic order (low, side, high, side)."""
    t1, t2 = tuple(r)
    p, q = tuple(t1 & t2)
    (w1,) = tuple(t1 - {p, q})
    (w2,) = tuple(t2 - {p, q})
    return (p, w1, q, w2)


def rhombus_sides(r: Rhombus) -> list[frozenset]:
    p, w1, q, w2 = rhombus_corners(r)
    return [frozenset((p, w1)), frozenset((w1, q)), frozenset((q, w2)), frozenset((w2, p))]


def type_partner(t: Triangle, tau: int) -> Triangle:
    """The triangle paired with ``t`` in the unique all-type-``tau`` tiling.

    A type-tau rhombus containing a given triangle is unique: it pairs the
    triangle across its single edge joining the two vertex classes != tau.
    """
    by_class = {vertex_class(p): p for p in t}
    classes = [c for c in (0, 1, 2) if c != tau]
    e = (by_class[classes[0]], by_class[classes[1]])
    for cand in triangles_of_edge(e):
        if cand != t:
            return cand
    raise AssertionError("triangle lattice inconsistency")


def type_rhombus(t: Triangle, tau: int) -> Rhombus:
    return rhombus_of(t, type_partner(t, tau))


def r0_partner(t: Triangle) -> Triangle:
    return type_partner(t, 0)


def r0_rhombus(t: Triangle) -> Rhombus:
    return rhombus_of(t, r0_partner(t))


# ---------------------------------------------------------------------------
# Projection of faces
# ---------------------------------------------------------------------------


def project_face(face: Face) -> tuple[Rhombus, int]:
    """Project a dual face to its rhombus and integer level n(f).

    (rhombus, n) determines the face uniquely; ``face_of_rhombus`` inverts.
    """
    verts = face_vertices(face)
    sums = [sum(v) for v in verts]
    n = coordinate_sum(face[0]) + 2
    lo = verts[sums.index(n - 1)]
    hi = verts[sums.index(n + 1)]
    tris = triangles_of_edge((phi(lo), phi(hi)))
    if len(tris) != 2:
        raise AssertionError("face diagonal must bound two triangles")
    return frozenset(tris), n


def face_of_rhombus(r: Rhombus, n: int) -> Face:
    """Inverse of project_face: the unique face at level ``n`` over rhombus ``r``."""
    if rhombus_type(r) != n % 3:
        raise ValueError("level does not match rhombus type")
    p, q = tuple(rhombus_shared_edge(r))
    if vertex_class(p) != (n - 1) % 3:
        p, q = q, p
    lo = lift_vertex(p, n - 1)
    hi = lift_vertex(q, n + 1)
    d = tuple(h - l for h, l in zip(hi, lo))
    if sorted(d) != [0, 1, 1]:
        raise AssertionError("rhombus diagonal does not lift to a face diagonal")
    mu = d.index(0)
    k = list(lo)
    k[mu] -= 1
    return (tuple(k), mu)


# ---------------------------------------------------------------------------
# Regions and tilings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """A finite triangle set with the standard (all type-0 exterior) boundary."""

    triangles: frozenset

    def __post_init__(self):
        if len(self.triangles) % 2:
            raise ValueError("region must contain an even number of triangles")

    def __len__(self) -> int:
        return len(self.triangles)

    @property
    def vertices(self) -> frozenset:
        return frozenset(p for t in self.triangles for p in t)

    def r0_closed(self) -> bool:
        """True if the exterior can be tiled with type-0 rhombi, i.e. the region
        itself is a union of rhombi of the all-type-0 tiling."""
        return all(r0_partner(t) in self.triangles for t in self.triangles)

    def sorted_triangles(self) -> list[Triangle]:
        return sorted(self.triangles, key=lambda t: sorted(t))


def hexagon_region(side: int, center: PlaneVertex | None = None) -> Region:
    """The regular hexagon of the given side length centered at a lattice vertex.

    When no center is given one is chosen so the region is a union of type-0
    rhombi whenever a vertex-centered hexagon of this size admits it (side = 1
    needs a class-1 or class-2 center, side = 2 a class-0 one; side = 0 mod 3
    vertex-centered hexagons are never closed and are used for counting only).
    """
    if center is None:
        center = {1: (0, 1), 2: (0, 0), 0: (0, 0)}[side % 3]
    ca, cb = center

    def hexdist(p: PlaneVertex) -> int:
        da, db = p[0] - ca, p[1] - cb
        return max(abs(da), abs(db), abs(da - db))

    tris = set()
    R = side + 1
    for a in range(ca - R, ca + R):
        for b in range(cb - R, cb + R):
            for t in (tri_up(a, b), tri_dn(a, b)):
                if all(hexdist(p) <= side for p in t):
                    tris.add(t)
    return Region(frozenset(tris))


def r0_closure(triangles: Iterable[Triangle]) -> Region:
    """Smallest region containing ``triangles`` that is a union of type-0 rhombi.

    Such regions (and only such) have an exterior tileable by the standard
    boundary; vertex-centered hexagons are already closed only for side 1
    (class 1 or 2 center) and side 2 (class 0), so larger working regions are
    produced by closing a hexagon with this function.
    """
    tris = set(triangles)
    todo = list(tris)
    while todo:
        t = todo.pop()
        p = r0_partner(t)
        if p not in tris:
            tris.add(p)
            todo.append(p)
    return Region(frozenset(tris))


@dataclass(frozen=True)
class Tiling:
    """An exact cover of a region by rhombi, with standard boundary outside."""

    region: Region
    rhombi: tuple

    def __post_init__(self):
        covered: set = set()
        for r in self.rhombi:
            for t in r:
                if t in covered:
                    raise ValueError("rhombi overlap")
                covered.add(t)
        if covered != set(self.region.triangles):
            raise ValueError("rhombi do not cover the region exactly")

    def __len__(self) -> int:
        return len(self.rhombi)

    def type_counts(self) -> tuple[int, int, int]:
        c = [0, 0, 0]
        for r in self.rhombi:
            c[rhombus_type(r)] += 1
        return tuple(c)

    def to_json(self) -> dict:
        tris = self.region.sorted_triangles()
        tri_id = {t: i for i, t in enumerate(tris)}
        return {
            "triangles": [sorted(t) for t in tris],
            "rhombi": [
                {
                    "pair": sorted(tri_id[t] for t in r),
                    "type": rhombus_type(r),
                    "orientation": rhombus_orientation(r),
                }
                for r in sorted(self.rhombi, key=lambda r: sorted(sorted(t) for t in r))
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Tiling":
        tris = [frozenset(tuple(p) for p in t) for t in doc["triangles"]]
        rhombi = tuple(
            rhombus_of(tris[r["pair"][0]], tris[r["pair"][1]]) for r in doc["rhombi"]
        )
        return cls(Region(frozenset(tris)), rhombi)


def enumerate_tilings(region: Region) -> list[Tiling]:
    """All exact covers of the region by rhombi, in deterministic order.

    Equivalent to enumerating dimer coverings of the dual hexagonal patch;
    backtracking always branches on the lexicographically first uncovered
    triangle, so the output order is reproducible.
    """
    tris = region.sorted_triangles()
    if len(tris) > 60:
        raise ValueError("enumeration capped at 60 triangles")
    tri_set = set(tris)
    order = {t: i for i, t in enumerate(tris)}
    neighbors: dict = {}
    for t in tris:
        nb = []
        for e in triangle_edges(t):
            for u in triangles_of_edge(tuple(e)):
                if u != t and u in tri_set:
                    nb.append(u)
        neighbors[t] = sorted(nb, key=lambda u: order[u])

    out: list[Tiling] = []
    covered: set = set()
    stack: list[Rhombus] = []

    def backtrack():
        free = [t for t in tris if t not in covered]
        if not free:
            out.append(Tiling(region, tuple(stack)))
            return
        t = free[0]
        for u in neighbors[t]:
            if u in covered:
                continue
            covered.add(t)
            covered.add(u)
            stack.append(rhombus_of(t, u))
            backtrack()
            stack.pop()
            covered.discard(t)
            covered.discard(u)

    backtrack()
    return out


def _hexagon_order(tris: list) -> list:
    """Order the six triangles around a vertex cyclically by shared edges."""
    order = [tris[0]]
    rest = list(tris[1:])
    while rest:
        cur = order[-1]
        nxt = next((u for u in rest if len(cur & u) == 2), None)
        if nxt is None:
            raise AssertionError("triangles do not form a hexagon")
        order.append(nxt)
        rest.remove(nxt)
    return order


def flippable_vertices(tiling: Tiling) -> list:
    """Vertices whose six surrounding triangles are covered by exactly three
    rhombi of the tiling: the elementary flip positions."""
    assign = {}
    for r in tiling.rhombi:
        for t in r:
            assign[t] = r
    out = []
    for p in sorted(tiling.region.vertices):
        tris = triangles_at_vertex(p)
        if not all(t in assign for t in tris):
            continue
        rs = {assign[t] for t in tris}
        if len(rs) == 3 and all(all(t in tris for t in r) for r in rs):
            out.append(p)
    return out


def apply_flip(tiling: Tiling, vertex: PlaneVertex) -> Tiling:
    """Rotate the three rhombi around a flippable vertex."""
    assign = {}
    for r in tiling.rhombi:
        for t in r:
            assign[t] = r
    tris = triangles_at_vertex(vertex)
    if not all(t in assign for t in tris):
        raise ValueError("vertex is not interior to the tiling")
    rs = {assign[t] for t in tris}
    if len(rs) != 3 or not all(all(t in tris for t in r) for r in rs):
        raise ValueError("vertex is not flippable in this tiling")
    order = _hexagon_order(tris)
    pairs = [(1, 2), (3, 4), (5, 0)] if assign[order[0]] == assign[order[1]] else [(0, 1), (2, 3), (4, 5)]
    for i, j in pairs:
        r = rhombus_of(order[i], order[j])
        assign[order[i]] = r
        assign[order[j]] = r
    return Tiling(tiling.region, tuple(set(assign.values())))


def random_tiling(region: Region, flips: int, seed: int) -> Tiling:
    """Seeded random walk over tilings by elementary hexagon flips.

    Starts from the all-type-0 tiling (the region must be a union of type-0
    rhombi) and applies ``flips`` uniformly chosen flips; deterministic in
    the seed.
    """
    if not region.r0_closed():
        raise ValueError("random_tiling needs an R0-closed region")
    tiling = Tiling(region, tuple({r0_rhombus(t) for t in region.triangles}))
    rng = np.random.default_rng(seed)
    for _ in range(flips):
        cands = flippable_vertices(tiling)
        if not cands:
            break
        tiling = apply_flip(tiling, cands[int(rng.integers(0, len(cands)))])
    return tiling


@dataclass
class DegeneracyReport:
    area: int
    count: int
    lower: float
    upper: float
    in_regime: bool

    @property
    def ok(self) -> bool:
        if not self.in_regime:
            return True
        return self.lower <= self.count <= self.upper


def degeneracy_bounds_check(region: Region) -> DegeneracyReport:
    """Check 2^(A/3) <= N <= 2^(2A) for the enumerated tiling count.

    The lower-bound construction needs at least one full flippable hexagon,
    so regions with fewer than 3 rhombi are flagged as below the regime and
    reported rather than asserted.
    """
    tilings = enumerate_tilings(region)
    area = len(region) // 2
    return DegeneracyReport(
        area=area,
        count=len(tilings),
        lower=2.0 ** (area / 3.0),
        upper=2.0 ** (2 * area),
        in_regime=area >= 3,
    )


# ---------------------------------------------------------------------------
# Height functions and the bijection
# ---------------------------------------------------------------------------


def height_increment(u: PlaneVertex, w: PlaneVertex) -> int:
    """+1 when w - u projects an up-step (+e_mu), -1 for a down-step."""
    d = (w[0] - u[0], w[1] - u[1])
    if d in UP_DIRS:
        return 1
    if d in DOWN_DIRS:
        return -1
    raise ValueError("not a lattice edge")


class HeightError(ValueError):
    """Raised when edge increments are inconsistent; carries a diagnostic cycle."""

    def __init__(self, message: str, cycle=None):
        super().__init__(message)
        self.cycle = cycle or []


def tiling_heights(tiling: Tiling) -> dict:
    """The unique height function of the tiling matching the staircase outside.

    Vertices on the region boundary obtain their staircase values; interior
    values follow by summing +-1 increments along tiling edges.  Any
    inconsistency (impossible for a valid tiling) aborts with the offending
    cycle attached.
    """
    region_vertices = tiling.region.vertices
    interior = {
        p for p in region_vertices
        if all(t in tiling.region.triangles for t in triangles_at_vertex(p))
    }
    h: dict = {p: stair_height(p) for p in region_vertices - interior}
    adj: dict = {}
    for r in tiling.rhombi:
        for e in rhombus_sides(r):
            u, w = tuple(e)
            adj.setdefault(u, set()).add(w)
            adj.setdefault(w, set()).add(u)
    frontier = [p for p in h if p in adj]
    while frontier:
        u = frontier.pop()
        for w in adj.get(u, ()):
            val = h[u] + height_increment(u, w)
            if w in h:
                if h[w] != val:
                    raise HeightError("inconsistent height increments", cycle=[u, w])
            else:
                h[w] = val
                frontier.append(w)
    missing = [p for p in region_vertices if p not in h]
    if missing:
        raise HeightError(f"unreached vertices {missing[:4]}")
    return h


def tiling_to_interface(tiling: Tiling) -> tuple[set, dict]:
    """Lift a tiling to its minimal-area interface.

    Returns (faces, heights): one face per rhombus, placed at the level given
    by the height function; together with the staircase outside the region the
    faces form the connected pinned interface of the standard boundary
    condition.
    """
    if not tiling.region.r0_closed():
        raise ValueError("standard boundary requires an R0-closed region")
    h = tiling_heights(tiling)
    faces = set()
    for r in tiling.rhombi:
        corners = rhombus_corners(r)
        values = sorted(h[p] for p in corners)
        n = values[1]
        if values != [n - 1, n, n, n + 1]:
            raise HeightError(f"rhombus heights {values} are not (n-1, n, n, n+1)")
        faces.add(face_of_rhombus(r, n))
    return faces, h


def tiling_from_heights(region: Region, heights) -> Tiling:
    """Assemble the tiling encoded by a height function.

    ``heights`` maps plane vertices to integers (staircase values by default
    outside the mapping); a field is valid when every elementary triangle
    carries three consecutive values.  Raising selected vertices by 3 is the
    elementary terrace move, so synthetic interface shapes can be written
    down directly.
    """
    if isinstance(heights, dict):
        hfun = lambda p: heights.get(p, stair_height(p))  # noqa: E731
    else:
        hfun = heights
    assign: dict = {}
    for t in region.triangles:
        hs = {p: hfun(p) for p in t}
        vals = sorted(hs.values())
        if vals[2] - vals[0] != 2 or vals[1] - vals[0] != 1:
            raise HeightError(f"triangle heights {vals} are not consecutive")
        lo = next(p for p, h in hs.items() if h == vals[0])
        hi = next(p for p, h in hs.items() if h == vals[2])
        partner = next(u for u in triangles_of_edge((lo, hi)) if u != t)
        if partner not in region.triangles:
            raise HeightError("rhombus diagonal leaves the region")
        assign[t] = rhombus_of(t, partner)
    return Tiling(region, tuple(set(assign.values())))


class OverlapError(ValueError):
    """Projection of a non-minimal interface; carries the overlapping triangles."""

    def __init__(self, overlaps: dict):
        super().__init__(f"{len(overlaps)} triangles covered more than once")
        self.overlaps = overlaps


def interface_to_tiling(faces: Iterable[Face]) -> Tiling:
    """Project a minimal-area interface patch onto its tiling.

    Errors with an overlap report (listing triangles and their overlap
    numbers) if any triangle is covered more than once.
    """
    coverage: dict = {}
    rhombi = []
    for f in faces:
        r, _ = project_face(f)
        rhombi.append(r)
        for t in r:
            coverage[t] = coverage.get(t, 0) + 1
    overlaps = {t: c - 1 for t, c in coverage.items() if c > 1}
    if overlaps:
        raise OverlapError(overlaps)
    return Tiling(Region(frozenset(coverage)), tuple(rhombi))


def config_from_heights(
    volume: Volume, heights: Callable[[PlaneVertex], int] | dict | None = None
) -> SpinConfiguration:
    """Spin configuration of the monotone interface with the given heights.

    ``heights`` maps plane vertices to interface heights (staircase values by
    default and outside the mapping).  A site k is + exactly when its
    coordinate sum is >= h(phi(k)) - 1; with the staircase heights this is the
    bc111 ground configuration.
    """
    if heights is None:
        hfun = stair_height
    elif isinstance(heights, dict):
        hfun = lambda p: heights.get(p, stair_height(p))  # noqa: E731
    else:
        hfun = heights

    def spin(site: Site) -> int:
        return 1 if coordinate_sum(site) >= hfun(phi(site)) - 1 else -1

    spins = np.empty(volume.padded_dims, dtype=np.int8)
    for site in volume.padded_sites():
        spins[volume.index(site)] = spin(site)
    return SpinConfiguration(volume, spins, bc="bc111")


# ---------------------------------------------------------------------------
# Rhombus configurations of general (possibly non-minimal) interfaces
# ---------------------------------------------------------------------------


@dataclass
class RConfiguration:
    """Projection of an interface: rhombus multiset with overlap bookkeeping.

    ``coverage`` maps triangles to the number of faces covering them (the
    overlap number is coverage - 1); classified edge sets are derived from the
    local plaquette structure of the source faces:

    * good edges: two faces sharing a 3D edge via two plaquette bonds that
      share a site (the three-against-one spin pattern);
    * delta edges: two coplanar faces side by side (the striped pattern);
    * omega edges: four faces around one 3D edge (the diagonal pattern);
    * lambda links: stacked parallel faces one lattice unit apart, counted
      with multiplicity.
    """

    faces: frozenset
    rhombus_multiplicity: dict = field(default_factory=dict)
    coverage: dict = field(default_factory=dict)
    good_edges: dict = field(default_factory=dict)
    delta_edges: dict = field(default_factory=dict)
    omega_edges: dict = field(default_factory=dict)
    lambda_links: dict = field(default_factory=dict)

    @classmethod
    def from_faces(cls, faces: Iterable[Face]) -> "RConfiguration":
        faces = frozenset(faces)
        rmult: dict = {}
        coverage: dict = {}
        proj: dict = {}
        for f in faces:
            r, n = project_face(f)
            proj[f] = (r, n)
            rmult[r] = rmult.get(r, 0) + 1
            for t in r:
                coverage[t] = coverage.get(t, 0) + 1

        # classify 3D edges shared by several faces
        edge_faces: dict = {}
        for f in faces:
            verts = face_vertices(f)
            for i in range(4):
                e = frozenset((verts[i], verts[(i + 1) % 4]))
                edge_faces.setdefault(e, []).append(f)
        good: dict = {}
        delta: dict = {}
        omega: dict = {}
        for e, flist in edge_faces.items():
            if len(flist) < 2:
                continue
            u, w = tuple(e)
            pe = frozenset((phi(u), phi(w)))
            if len(flist) == 4:
                omega[pe] = omega.get(pe, 0) + 1
            elif len(flist) == 2:
                f1, f2 = flist
                if f1[1] == f2[1]:
                    # parallel coplanar faces: striped pattern, delta edge
                    delta[pe] = delta.get(pe, 0) + 1
                else:
                    good[pe] = good.get(pe, 0) + 1
            else:
                raise AssertionError("a 3D edge is shared by 3 faces")

        # lambda links: faces (k, mu) and (k + e_mu, mu)
        lam: dict = {}
        for (k, mu) in faces:
            k2 = list(k)
            k2[mu] += 1
            if (tuple(k2), mu) in faces:
                center2 = tuple(2 * k[i] + 1 + (2 if i == mu else 0) for i in range(3))
                key = (phi(center2), mu)
                lam[key] = lam.get(key, 0) + 1
        return cls(
            faces=faces,
            rhombus_multiplicity=rmult,
            coverage=coverage,
            good_edges=good,
            delta_edges=delta,
            omega_edges=omega,
            lambda_links=lam,
        )

    def overlap_number(self, t: Triangle) -> int:
        return max(self.coverage.get(t, 1) - 1, 0)

    @property
    def overlapping_triangles(self) -> dict:
        return {t: c - 1 for t, c in self.coverage.items() if c > 1}

    @property
    def overlapping_rhombi(self) -> set:
        """Rhombi containing at least one overlapping triangle."""
        ot = set(self.overlapping_triangles)
        return {r for r in self.rhombus_multiplicity if (set(r) & ot) or self.rhombus_multiplicity[r] > 1}

    def is_tiling(self) -> bool:
        return not self.overlapping_triangles

    def total_overlap(self) -> int:
        return sum(self.overlapping_triangles.values())

    def extra_faces(self) -> int:
        """a^ov summed over the configuration: total overlap / 2."""
        tot = self.total_overlap()
        assert tot % 2 == 0, "overlap numbers must be even"
        return tot // 2


@dataclass(frozen=True)
class EdgeClass:
    kind: str              # "good" | "delta" | "omega" | "none" | "mixed"
    good: int
    delta: int
    omega: int


def classify_local(rconfig: RConfiguration, edge: Iterable[PlaneVertex]) -> EdgeClass:
    """Classification of a plane edge in the projected configuration.

    For minimal interfaces every interior tiling edge is either good (the two
    incident rhombi have the same type) or delta (different types); around
    overlapping structures an edge may carry several classifications at
    different levels, reported as "mixed".
    """
    pe = frozenset(tuple(p) for p in edge)
    g = rconfig.good_edges.get(pe, 0)
    d = rconfig.delta_edges.get(pe, 0)
    o = rconfig.omega_edges.get(pe, 0)
    kinds = [k for k, c in (("good", g), ("delta", d), ("omega", o)) if c]
    kind = kinds[0] if len(kinds) == 1 else ("none" if not kinds else "mixed")
    return EdgeClass(kind=kind, good=g, delta=d, omega=o)


def good_pair_fraction_of_faces(faces: Iterable[Face]) -> tuple[float, bool]:
    """(good edges / classified interior edges, overlap flag) of a projection.

    On a non-minimal interface the fraction is computed on the classified
    edges only and the flag is set.
    """
    rc = RConfiguration.from_faces(faces)
    good = sum(rc.good_edges.values())
    delta = sum(rc.delta_edges.values())
    omega = sum(rc.omega_edges.values())
    total = good + delta + omega
    if total == 0:
        return 1.0, not rc.is_tiling()
    return good / total, not rc.is_tiling()
