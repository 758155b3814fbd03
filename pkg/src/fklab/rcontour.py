"""Decomposition of rhombus configurations into bases and R-contours, contour
energies, geometric equivalence classes, and the generalized Dobrushin removal
transformation.

A base is a maximal connected set of good pairs (all rhombi of one type); the
R-contours are the connected components of everything else: delta/omega edges,
lambda links and rhombi that belong to no good pair.  Connectivity of contour
material is through shared plane vertices (contours are closed complexes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classical import ModelCoefficients
from .tiling import (
    RConfiguration,
    Region,
    Rhombus,
    Tiling,
    r0_rhombus,
    rhombus_of,
    rhombus_sides,
    rhombus_type,
    tiling_to_interface,
    triangles_of_edge,
    type_rhombus,
)

def _translate_vertex(p, d):
    return (p[0] + d[0], p[1] + d[1])


def _translate_triangle(t, d):
    return frozenset(_translate_vertex(p, d) for p in t)


def _translate_rhombus(r, d):
    return frozenset(_translate_triangle(t, d) for t in r)


#: Plane step realizing the vertical translation S: type map tau -> tau - 1.
S_STEP = (1, 1)


@dataclass(frozen=True)
class Base:
    """Maximal connected set of good pairs; all member rhombi share one type."""

    rhombi: frozenset
    type: int
    boundary: bool = False

    def __len__(self):
        return len(self.rhombi)


@dataclass
class OverlappingSubcontour:
    rhombi: frozenset
    overlap: dict            # triangle -> overlap number o(t)
    delta: int = 0
    omega: int = 0
    lam: int = 0

    @property
    def a_ov(self) -> int:
        total = sum(self.overlap.values())
        assert total % 2 == 0
        return total // 2

    @property
    def support(self) -> frozenset:
        return frozenset(t for r in self.rhombi for t in r)


@dataclass
class RContour:
    """A maximal connected component of the complement of the bases."""

    rhombi: frozenset                      # non-based rhombi of the contour
    delta_edges: frozenset                 # plane edges with striped pattern
    omega_edges: frozenset
    lambda_links: frozenset                # ((plane point key, axis), multiplicity)
    overlapping: list = field(default_factory=list)
    standard_delta: list = field(default_factory=list)  # per standard subcontour

    @property
    def support_vertices(self) -> frozenset:
        vs = set()
        for r in self.rhombi:
            for t in r:
                vs |= set(t)
        for e in self.delta_edges | self.omega_edges:
            vs |= set(e)
        return frozenset(vs)

    @property
    def support_triangles(self) -> frozenset:
        return frozenset(t for r in self.rhombi for t in r)

    @property
    def n_sites(self) -> int:
        return len(self.support_vertices)

    @property
    def is_standard(self) -> bool:
        return not self.overlapping

    def site_bound(self) -> int:
        """Right-hand side of the site-count bound for this contour."""
        s = 0
        for ov in self.overlapping:
            s += 3 * ov.a_ov + (ov.delta + 1) + (ov.lam + 1) + (ov.omega + 1)
        for d in self.standard_delta:
            s += d + 1
        return s


@dataclass
class Decomposition:
    bases: list
    contours: list
    rconfig: RConfiguration

    def boundary_base(self) -> Base:
        for b in self.bases:
            if b.boundary:
                return b
        raise ValueError("no boundary base identified")

    def to_json(self, coeffs: ModelCoefficients | None = None) -> dict:
        co = coeffs or ModelCoefficients(U=8.0)
        return {
            "bases": [
                {"type": b.type, "size": len(b.rhombi), "boundary": b.boundary}
                for b in self.bases
            ],
            "contours": [
                {
                    "std_delta": list(c.standard_delta),
                    "a_ov": [ov.a_ov for ov in c.overlapping],
                    "omega": [ov.omega for ov in c.overlapping],
                    "lambda": [ov.lam for ov in c.overlapping],
                    "F": f_energy(c, co),
                }
                for c in self.contours
            ],
        }


def f_energy(contour: RContour, coeffs: ModelCoefficients) -> float:
    """Excitation energy of an R-contour in the fourth-order truncation:

        F = J2 * sum a_ov + K2 * (delta lines, standard and overlapping)
            + U^-3 * omega lines + (1/4) U^-3 * lambda links.
    """
    U = coeffs.U
    e = 0.0
    for ov in contour.overlapping:
        e += coeffs.j2 * ov.a_ov
        e += coeffs.k2 * ov.delta
        e += (1.0 / U**3) * ov.omega
        e += (1.0 / (4.0 * U**3)) * ov.lam
    for d in contour.standard_delta:
        e += coeffs.k2 * d
    return e


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != self.parent[p]:
            self.parent[p] = self.parent[self.parent[p]]
            p = self.parent[p]
        self.parent[x] = p
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def groups(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def decompose(faces_or_rc, boundary_rhombus: Rhombus | None = None) -> Decomposition:
    """Split a rhombus configuration into bases and R-contours.

    Accepts a face set (projected via RConfiguration.from_faces) or a
    prebuilt RConfiguration.  Good pairs require both rhombi simple and
    non-overlapping.  The base of largest extent is flagged as the
    boundary-connected one (type 0 under standard boundary conditions);
    ``boundary_rhombus`` can pin the choice explicitly.
    """
    if isinstance(faces_or_rc, RConfiguration):
        rc = faces_or_rc
    else:
        rc = RConfiguration.from_faces(faces_or_rc)

    overlapping_rhombi = rc.overlapping_rhombi
    simple = {r for r, m in rc.rhombus_multiplicity.items() if m == 1 and r not in overlapping_rhombi}

    # good pairs: good-classified plane edges whose two flanking simple rhombi exist
    side_index: dict = {}
    for r in simple:
        for e in rhombus_sides(r):
            side_index.setdefault(e, []).append(r)
    good_pairs = []
    for e, count in rc.good_edges.items():
        rs = side_index.get(e, [])
        if len(rs) == 2:
            good_pairs.append((e, rs[0], rs[1]))

    uf = _UnionFind()
    paired = set()
    for e, r1, r2 in good_pairs:
        uf.union(("r", r1), ("r", r2))
        paired.add(r1)
        paired.add(r2)
    bases = []
    for members in uf.groups().values():
        rhombi = frozenset(m[1] for m in members)
        types = {rhombus_type(r) for r in rhombi}
        assert len(types) == 1, "a base must have a single type"
        bases.append(Base(rhombi=rhombi, type=types.pop()))
    if bases:
        big = max(range(len(bases)), key=lambda i: len(bases[i].rhombi))
        if boundary_rhombus is not None:
            for i, b in enumerate(bases):
                if boundary_rhombus in b.rhombi:
                    big = i
        bases[big] = Base(rhombi=bases[big].rhombi, type=bases[big].type, boundary=True)

    # contour material: unbased rhombi, delta/omega edges, lambda links
    unbased = [r for r in rc.rhombus_multiplicity if r not in paired]
    cuf = _UnionFind()
    for r in unbased:
        key = ("r", r)
        cuf.find(key)
        for t in r:
            for p in t:
                cuf.union(key, ("v", p))
    for e in rc.delta_edges:
        key = ("d", e)
        cuf.find(key)
        for p in e:
            cuf.union(key, ("v", p))
    for e in rc.omega_edges:
        key = ("o", e)
        cuf.find(key)
        for p in e:
            cuf.union(key, ("v", p))
    for (pt, mu), mult in rc.lambda_links.items():
        key = ("l", (pt, mu))
        cuf.find(key)
        # endpoints of the link: the projections of the two face centers are
        # interior points of the two rhombi; connect through the rhombi they
        # belong to instead (the link joins structures that already share
        # vertices in every configuration arising from an interface), so tie
        # the link to the nearest lattice vertex of its doubled-coordinate key.
        a, b = pt
        for p in ((a // 2, b // 2), ((a + 1) // 2, (b + 1) // 2)):
            cuf.union(key, ("v", p))

    groups = cuf.groups()
    contours = []
    for members in groups.values():
        rhombi = frozenset(m[1] for m in members if m[0] == "r")
        deltas = frozenset(m[1] for m in members if m[0] == "d")
        omegas = frozenset(m[1] for m in members if m[0] == "o")
        lams = frozenset(m[1] for m in members if m[0] == "l")
        if not (rhombi or deltas or omegas or lams):
            continue  # isolated vertices are not contours
        contour = RContour(
            rhombi=rhombi,
            delta_edges=deltas,
            omega_edges=omegas,
            lambda_links=lams,
        )
        _split_subcontours(contour, rc)
        contours.append(contour)
    contours.sort(key=lambda c: sorted(map(sorted, c.support_vertices)) if c.support_vertices else [])
    return Decomposition(bases=bases, contours=contours, rconfig=rc)


def _split_subcontours(contour: RContour, rc: RConfiguration) -> None:
    """Group a contour's material into overlapping and standard subcontours."""
    ov_rhombi = [r for r in contour.rhombi if r in rc.overlapping_rhombi]
    uf = _UnionFind()
    for r in ov_rhombi:
        key = ("r", r)
        uf.find(key)
        for t in r:
            for p in t:
                uf.union(key, ("v", p))
    comps = []
    for members in uf.groups().values():
        rhombi = frozenset(m[1] for m in members if m[0] == "r")
        if rhombi:
            comps.append(rhombi)
    subcontours = []
    claimed_delta = set()
    for rhombi in comps:
        verts = {p for r in rhombi for t in r for p in t}
        overlap = {}
        for r in rhombi:
            for t in r:
                o = rc.overlap_number(t)
                if o:
                    overlap[t] = o
        delta = sum(
            rc.delta_edges[e] for e in contour.delta_edges if set(e) & verts
        )
        for e in contour.delta_edges:
            if set(e) & verts:
                claimed_delta.add(e)
        omega = sum(rc.omega_edges[e] for e in contour.omega_edges if set(e) & verts)
        lam = 0
        for (pt, mu) in contour.lambda_links:
            a, b = pt
            near = {(a // 2, b // 2), ((a + 1) // 2, (b + 1) // 2)}
            if near & verts:
                lam += rc.lambda_links[(pt, mu)]
        subcontours.append(
            OverlappingSubcontour(rhombi=rhombi, overlap=overlap, delta=delta, omega=omega, lam=lam)
        )
    contour.overlapping = subcontours

    # standard subcontours: connected components of the unclaimed delta edges
    suf = _UnionFind()
    for e in contour.delta_edges:
        if e in claimed_delta:
            continue
        key = ("d", e)
        suf.find(key)
        for p in e:
            suf.union(key, ("v", p))
    standard = []
    for members in suf.groups().values():
        edges = [m[1] for m in members if m[0] == "d"]
        if edges:
            standard.append(sum(rc.delta_edges[e] for e in edges))
    contour.standard_delta = sorted(standard, reverse=True)


# ---------------------------------------------------------------------------
# Geometric contours
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometricContour:
    """Equivalence class of R-contours: standard parts verbatim, overlapping
    parts by support only, each with its minimal rhombus cover size r_ov."""

    standard_delta: tuple
    overlapping_supports: tuple    # of frozensets of triangles
    r_ov: tuple

    @property
    def total_r_ov(self) -> int:
        return sum(self.r_ov)


def minimal_rhombus_cover(support: frozenset) -> int:
    """Minimum number of rhombi inside ``support`` whose union covers it.

    Exact branch-and-bound over the first uncovered triangle; rhombi may
    overlap (covers are by whole rhombi).  Desk scale: at most 12 rhombi.
    """
    tris = sorted(support, key=lambda t: sorted(t))
    candidates: dict = {}
    for t in tris:
        cand = []
        for e in _triangle_edges(t):
            for u in triangles_of_edge(tuple(e)):
                if u != t and u in support:
                    cand.append(rhombus_of(t, u))
        if not cand:
            raise ValueError("support triangle not coverable by a rhombus inside support")
        candidates[t] = cand

    best = [len(tris)]  # never need more rhombi than triangles

    def search(uncovered: frozenset, used: int):
        if used >= best[0]:
            return
        if not uncovered:
            best[0] = used
            return
        t = min(uncovered, key=lambda x: sorted(x))
        for r in candidates[t]:
            search(uncovered - set(r), used + 1)

    if len(tris) > 24:
        raise ValueError("minimal cover capped at supports of 12 rhombi")
    search(frozenset(tris), 0)
    return best[0]


def _triangle_edges(t):
    vs = sorted(t)
    return [frozenset((vs[0], vs[1])), frozenset((vs[0], vs[2])), frozenset((vs[1], vs[2]))]


def geometric_class(contour: RContour) -> GeometricContour:
    """The support-equivalence class of a contour with exact r_ov values."""
    supports = tuple(sorted((ov.support for ov in contour.overlapping),
                            key=lambda s: sorted(map(sorted, s))))
    r_ov = tuple(minimal_rhombus_cover(s) for s in supports)
    for ov, r in zip(sorted(contour.overlapping, key=lambda o: sorted(map(sorted, o.support))), r_ov):
        assert ov.a_ov >= r, "a_ov >= r_ov must hold for interface projections"
    return GeometricContour(
        standard_delta=tuple(contour.standard_delta),
        overlapping_supports=supports,
        r_ov=r_ov,
    )


# ---------------------------------------------------------------------------
# Dobrushin removal on minimal configurations
# ---------------------------------------------------------------------------


class DobrushinViolation(RuntimeError):
    """Raised when translated interiors collide on non-type-0 material.

    This would falsify the non-intersection property of translated interiors;
    it is surfaced loudly and
    treated as a test failure, never as a recoverable state.
    """

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}


@dataclass
class RemovalReport:
    removed_f: float
    contours_before: int
    contours_after: int
    shifts: dict
    interiors: list = field(default_factory=list)  # {"size", "shift", "contours_inside"}

    @property
    def nested(self) -> bool:
        return any(info["contours_inside"] > 0 for info in self.interiors)


def _collared_assignment(tiling: Tiling, collar: int) -> dict:
    """triangle -> rhombus map of the tiling extended by an R0 collar."""
    assign = {}
    for r in tiling.rhombi:
        for t in r:
            assign[t] = r
    frontier = set(tiling.region.triangles)
    for _ in range(2 * collar + 2):
        new = set()
        for t in frontier:
            for e in _triangle_edges(t):
                for u in triangles_of_edge(tuple(e)):
                    if u not in assign and u not in new:
                        new.add(u)
        for t in new:
            r = r0_rhombus(t)
            assign[t] = r
            for u in r:
                if u not in assign:
                    assign[u] = r
        frontier = new
    return assign


def faces_of_assignment(assign: dict) -> set:
    """Lift a minimal triangle->rhombus window to its interface face set.

    Heights follow from the staircase values on the window boundary.
    """
    region = Region(frozenset(assign))
    tiling = Tiling(region, tuple(set(assign.values())))
    faces, _ = tiling_to_interface(tiling)
    return faces


def decompose_tiling(tiling: Tiling, collar: int = 2) -> Decomposition:
    """Decompose a minimal configuration, embedded in an R0 collar of the
    given width so that boundary edges classify correctly."""
    return decompose(faces_of_assignment(_collared_assignment(tiling, collar)))


def dobrushin_remove(
    tiling: Tiling,
    contour_index: int = 0,
    collar: int = 2,
    coeffs: ModelCoefficients | None = None,
):
    """Remove one R-contour from a minimal configuration.

    The contour's complement splits into the exterior and interior components;
    each interior is translated by S^n (plane step n * (1,1)) with n chosen so
    its adjacent base becomes type 0, the contour is erased, and all gaps are
    filled with the type-0 tiling (which is triangle-unique, so the fill is
    deterministic and order independent).  Returns (new_tiling, report).

    Raises DobrushinViolation if translated material collides inconsistently,
    which would falsify the non-intersection property.
    """
    coeffs = coeffs or ModelCoefficients(U=8.0)
    assign = _collared_assignment(tiling, collar)
    window = frozenset(assign)
    faces = faces_of_assignment(assign)
    deco = decompose(faces)
    if not deco.contours:
        raise ValueError("configuration has no contours to remove")
    if not (0 <= contour_index < len(deco.contours)):
        raise ValueError("contour index out of range")
    target = deco.contours[contour_index]
    f_before = sorted(f_energy(c, coeffs) for c in deco.contours)

    supp_tris = set(target.support_triangles)
    supp_verts = set(target.support_vertices)

    # complement components: triangles connected across non-support edges,
    # merged across shared vertices not in the support
    comp = _UnionFind()
    for t in window:
        if t in supp_tris:
            continue
        comp.find(("t", t))
        for e in _triangle_edges(t):
            if e <= supp_verts and frozenset(e) in (target.delta_edges | target.omega_edges):
                continue
            for u in triangles_of_edge(tuple(e)):
                if u in window and u not in supp_tris:
                    comp.union(("t", t), ("t", u))
        for p in t:
            if p not in supp_verts:
                comp.union(("t", t), ("p", p))
    groups = {}
    for members in comp.groups().values():
        tris = [m[1] for m in members if m[0] == "t"]
        if tris:
            groups[min(tris, key=lambda x: sorted(x))] = set(tris)

    # exterior = component containing a window-boundary triangle
    boundary_tris = {
        t for t in window
        if any(u not in window for e in _triangle_edges(t) for u in triangles_of_edge(tuple(e)))
    }
    exterior_key = None
    for key, tris in groups.items():
        if tris & boundary_tris:
            exterior_key = key
            break
    if exterior_key is None:
        raise ValueError("could not identify the exterior component")

    new_assign: dict = {}
    for t in groups[exterior_key]:
        new_assign[t] = assign[t]

    other_supports = [
        (j, set(c.support_vertices))
        for j, c in enumerate(deco.contours)
        if j != contour_index
    ]

    def adjacent_base_type(tris) -> int:
        types = set()
        for t in tris:
            if set(t) & supp_verts:
                types.add(rhombus_type(assign[t]))
        if len(types) != 1:
            raise DobrushinViolation(
                "component has an ambiguous adjacent base type", dump={"types": types}
            )
        return types.pop()

    # the gap is refilled with the base type of the exterior; interiors are
    # translated so their adjacent bases match it (tau(S^n[C]) = tau - n)
    tau0 = adjacent_base_type(groups[exterior_key])
    shifts = {}
    interiors = []
    conflicts = []
    for key, tris in groups.items():
        if key == exterior_key:
            continue
        tau = adjacent_base_type(tris)
        n = {0: 0, 1: 1, 2: -1}[(tau - tau0) % 3]
        d = (n * S_STEP[0], n * S_STEP[1])
        shifts[key] = n
        tri_verts = {p for t in tris for p in t}
        inside = sum(1 for _, supp in other_supports if supp and supp <= tri_verts)
        interiors.append({"size": len(tris), "shift": n, "contours_inside": inside})
        for t in tris:
            r = _translate_rhombus(assign[t], d)
            for u in r:
                prev = new_assign.get(u)
                if prev is None:
                    new_assign[u] = r
                elif prev != r:
                    if rhombus_type(prev) == rhombus_type(r):
                        raise AssertionError("two distinct same-type rhombi share a triangle")
                    conflicts.append((u, prev, r))
    if conflicts:
        raise DobrushinViolation(
            f"{len(conflicts)} triangle collisions between translated interiors",
            dump={"conflicts": conflicts[:8]},
        )

    # fill the gaps with the exterior's base type (unique per triangle)
    for t in window:
        if t in new_assign:
            continue
        r = type_rhombus(t, tau0)
        for u in r:
            prev = new_assign.get(u)
            if prev is not None and prev != r:
                raise DobrushinViolation(
                    "gap fill collides with translated material",
                    dump={"triangle": u, "kept": prev},
                )
        for u in r:
            new_assign[u] = r

    # restrict to the window (fill rhombi may stick out by one triangle)
    out_rhombi = set(new_assign.values())
    out_tris = frozenset(t for r in out_rhombi for t in r)
    new_tiling = Tiling(Region(out_tris), tuple(out_rhombi))

    new_faces = faces_of_assignment(new_assign)
    new_deco = decompose(new_faces)
    f_after = sorted(f_energy(c, coeffs) for c in new_deco.contours)
    report = RemovalReport(
        removed_f=f_energy(target, coeffs),
        contours_before=len(deco.contours),
        contours_after=len(new_deco.contours),
        shifts=shifts,
        interiors=interiors,
    )
    if report.contours_after != report.contours_before - 1:
        raise DobrushinViolation(
            "contour count did not decrease by one",
            dump={"before": report.contours_before, "after": report.contours_after},
        )
    # untouched/translated contours keep their energies
    expect = list(f_before)
    expect.remove(f_energy(target, coeffs))
    if len(expect) != len(f_after) or any(abs(a - b) > 1e-12 for a, b in zip(sorted(expect), f_after)):
        raise DobrushinViolation(
            "energies of remaining contours changed",
            dump={"before": expect, "after": f_after},
        )
    return new_tiling, report
