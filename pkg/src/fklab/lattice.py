"""Finite 3D lattice geometry, boundary conditions, spin configurations and bond clusters.

Sites live on a cubic lattice with half-integer physical coordinates: a site is
stored as an integer triple ``k`` and sits at ``x = k + 1/2`` componentwise.
All geometric predicates are evaluated on the integer representation, so
boundary classification is bit-exact.  The coordinate sum ``x1+x2+x3`` equals
``k1+k2+k3 + 3/2`` and is therefore always a half-odd integer, never inside
(-1/2, 1/2).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

Site = tuple[int, int, int]

#: Nearest-neighbour steps, in a fixed order (+x, -x, +y, -y, +z, -z).
NEIGHBOR_STEPS: tuple[Site, ...] = (
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
)

UNIT_STEPS: tuple[Site, ...] = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

VALID_BC = ("hom_plus", "hom_minus", "bc100", "bc111")


def coordinate_sum(site: Site) -> int:
    """Integer part of the physical coordinate sum: x1+x2+x3 = coordinate_sum + 3/2."""
    return site[0] + site[1] + site[2]


def boundary_spin(bc: str, site: Site) -> int:
    """Spin prescribed at ``site`` when it is treated as exterior.

    ``bc100`` puts +1 where the third physical coordinate is >= 1/2 (k3 >= 0),
    ``bc111`` puts +1 where x1+x2+x3 >= 1/2 (k1+k2+k3 >= -1).  The homogeneous
    conditions are constant.
    """
    if bc == "hom_plus":
        return 1
    if bc == "hom_minus":
        return -1
    if bc == "bc100":
        return 1 if site[2] >= 0 else -1
    if bc == "bc111":
        return 1 if coordinate_sum(site) >= -1 else -1
    raise ValueError(f"unknown boundary condition {bc!r}")


def sublattice_sign(site: Site) -> int:
    """Staggering factor (-1)^(k1+k2+k3); maps the Neel pattern to the uniform one."""
    return -1 if coordinate_sum(site) & 1 else 1


@dataclass(frozen=True)
class Volume:
    """Axis-aligned box of sites plus a frozen boundary shell.

    ``lo`` is the smallest site of the box (inclusive), ``dims`` its extent.
    The shell consists of all sites within Chebyshev distance ``shell`` of the
    box that are not in it; shell spins are fixed by the boundary condition and
    never updated by dynamics.  ``shell`` must cover the interaction range of
    the Hamiltonian in use (2 for the fourth-order model, 1 for second order).
    """

    dims: tuple[int, int, int]
    shell: int = 2
    lo: tuple[int, int, int] | None = None

    def __post_init__(self):
        if any(d <= 0 for d in self.dims):
            raise ValueError("dims must be positive")
        if self.shell < 1:
            raise ValueError("shell depth must be >= 1")
        if self.lo is None:
            object.__setattr__(self, "lo", tuple(-(d // 2) for d in self.dims))

    @property
    def hi(self) -> tuple[int, int, int]:
        return tuple(l + d - 1 for l, d in zip(self.lo, self.dims))

    @property
    def padded_lo(self) -> tuple[int, int, int]:
        return tuple(l - self.shell for l in self.lo)

    @property
    def padded_dims(self) -> tuple[int, int, int]:
        return tuple(d + 2 * self.shell for d in self.dims)

    def contains(self, site: Site) -> bool:
        return all(l <= s <= h for l, s, h in zip(self.lo, site, self.hi))

    def contains_padded(self, site: Site) -> bool:
        return all(
            l - self.shell <= s <= h + self.shell
            for l, s, h in zip(self.lo, site, self.hi)
        )

    def sites(self) -> Iterator[Site]:
        for k in itertools.product(*(range(l, l + d) for l, d in zip(self.lo, self.dims))):
            yield k

    def padded_sites(self) -> Iterator[Site]:
        lo, dims = self.padded_lo, self.padded_dims
        for k in itertools.product(*(range(l, l + d) for l, d in zip(lo, dims))):
            yield k

    def index(self, site: Site) -> tuple[int, int, int]:
        """Array index of ``site`` in the padded box."""
        return tuple(s - l for s, l in zip(site, self.padded_lo))

    def site_of_index(self, idx: Sequence[int]) -> Site:
        return tuple(int(i) + l for i, l in zip(idx, self.padded_lo))

    def to_json(self, bc: str | None = None) -> dict:
        out = {"dims": list(self.dims), "shell": self.shell, "lo": list(self.lo)}
        if bc is not None:
            out["bc"] = bc
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "Volume":
        allowed = {"dims", "shell", "lo", "bc"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown volume keys: {sorted(unknown)}")
        dims = tuple(int(d) for d in doc["dims"])
        if len(dims) != 3:
            raise ValueError("dims must have 3 entries")
        lo = tuple(int(x) for x in doc["lo"]) if "lo" in doc else None
        return cls(dims=dims, shell=int(doc.get("shell", 2)), lo=lo)


class SpinConfiguration:
    """Spins +-1 on a volume plus its frozen shell, stored as an int8 array.

    The array covers the padded box; entries outside the shell-completed region
    do not exist. Instances are immutable: transforming operations return new
    configurations.
    """

    def __init__(self, volume: Volume, spins: np.ndarray, bc: str | None = None):
        spins = np.asarray(spins, dtype=np.int8)
        if spins.shape != volume.padded_dims:
            raise ValueError("spin array shape does not match padded volume")
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be +-1 everywhere on volume and shell")
        self.volume = volume
        self.bc = bc
        self._spins = spins
        self._spins.setflags(write=False)

    @property
    def spins(self) -> np.ndarray:
        return self._spins

    def spin(self, site: Site) -> int:
        return int(self._spins[self.volume.index(site)])

    @classmethod
    def from_boundary(cls, volume: Volume, bc: str) -> "SpinConfiguration":
        """Configuration equal to the boundary prescription everywhere (shell and bulk)."""
        spins = np.empty(volume.padded_dims, dtype=np.int8)
        for site in volume.padded_sites():
            spins[volume.index(site)] = boundary_spin(bc, site)
        return cls(volume, spins, bc=bc)

    @classmethod
    def from_function(cls, volume: Volume, bc: str, fn) -> "SpinConfiguration":
        """Interior spins from ``fn(site)``; shell spins forced to the bc prescription."""
        spins = np.empty(volume.padded_dims, dtype=np.int8)
        for site in volume.padded_sites():
            if volume.contains(site):
                spins[volume.index(site)] = fn(site)
            else:
                spins[volume.index(site)] = boundary_spin(bc, site)
        return cls(volume, spins, bc=bc)

    def with_flip(self, site: Site) -> "SpinConfiguration":
        if not self.volume.contains(site):
            raise ValueError("cannot flip a shell spin")
        spins = self._spins.copy()
        spins[self.volume.index(site)] *= -1
        return SpinConfiguration(self.volume, spins, bc=self.bc)

    def with_spins(self, spins: np.ndarray) -> "SpinConfiguration":
        return SpinConfiguration(self.volume, spins, bc=self.bc)

    def shell_consistent(self) -> bool:
        """True if every shell spin equals the active boundary prescription."""
        if self.bc is None:
            return True
        for site in self.volume.padded_sites():
            if not self.volume.contains(site):
                if self.spin(site) != boundary_spin(self.bc, site):
                    return False
        return True


def stagger(config: SpinConfiguration) -> SpinConfiguration:
    """Multiply every spin by the sublattice parity (-1)^(k1+k2+k3).

    This is the antiferro<->ferro change of frame: the Neel configuration maps
    to the uniform +1 configuration and vice versa.  It is an involution.
    """
    vol = config.volume
    lo = vol.padded_lo
    dims = vol.padded_dims
    g = np.add.outer(
        np.add.outer(np.arange(lo[0], lo[0] + dims[0]), np.arange(lo[1], lo[1] + dims[1])),
        np.arange(lo[2], lo[2] + dims[2]),
    )
    sign = np.where(g & 1, -1, 1).astype(np.int8)
    return SpinConfiguration(vol, sign * config.spins, bc=None)


# ---------------------------------------------------------------------------
# Bond clusters and the connectivity measure g(B)
# ---------------------------------------------------------------------------

def is_connected(sites: Iterable[Site]) -> bool:
    """Nearest-neighbour connectedness of a site set."""
    todo = set(sites)
    if not todo:
        return False
    seen = {next(iter(todo))}
    frontier = list(seen)
    while frontier:
        s = frontier.pop()
        for d in NEIGHBOR_STEPS:
            t = (s[0] + d[0], s[1] + d[1], s[2] + d[2])
            if t in todo and t not in seen:
                seen.add(t)
                frontier.append(t)
    return seen == todo


def _l1(a: Site, b: Site) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])


def closed_walk_length(sites: Sequence[Site]) -> int:
    """Minimum length of a closed lattice walk visiting every site of the set.

    The walk may leave the set; between consecutive visited sites it costs at
    least the L1 distance and any L1 geodesic is realizable on the lattice, so
    the minimum equals the shortest closed tour under the L1 metric.  Solved
    exactly by Held-Karp dynamic programming (desk scale: <= 10 sites).
    """
    pts = list(dict.fromkeys(sites))
    n = len(pts)
    if n == 0:
        raise ValueError("empty site set")
    if n == 1:
        return 0
    if n > 10:
        raise ValueError("closed_walk_length capped at 10 sites")
    dist = [[_l1(a, b) for b in pts] for a in pts]
    full = 1 << (n - 1)
    # dp[mask][j]: shortest path from pts[n-1] through mask ending at j < n-1
    INF = 1 << 30
    dp = [[INF] * (n - 1) for _ in range(full)]
    for j in range(n - 1):
        dp[1 << j][j] = dist[n - 1][j]
    for mask in range(full):
        row = dp[mask]
        for j in range(n - 1):
            base = row[j]
            if base >= INF:
                continue
            rem = ~mask & (full - 1)
            while rem:
                bit = rem & -rem
                i = bit.bit_length() - 1
                nm = mask | bit
                cand = base + dist[j][i]
                if cand < dp[nm][i]:
                    dp[nm][i] = cand
                rem ^= bit
    best = min(dp[full - 1][j] + dist[j][n - 1] for j in range(n - 1))
    return best


@dataclass(frozen=True)
class BondCluster:
    """A connected finite site set with its cached connectivity measure.

    ``g`` is the minimal closed-walk length through all sites minus one
    (by convention 0 for a singleton).
    """

    sites: frozenset
    g: int

    @classmethod
    def from_sites(cls, sites: Iterable[Site]) -> "BondCluster":
        fs = frozenset(tuple(s) for s in sites)
        if not fs:
            raise ValueError("empty cluster")
        if not is_connected(fs):
            raise ValueError("cluster is not nearest-neighbour connected")
        if len(fs) == 1:
            return cls(fs, 0)
        return cls(fs, closed_walk_length(sorted(fs)) - 1)

    def __len__(self) -> int:
        return len(self.sites)


def connectivity_g(cluster: BondCluster | Iterable[Site]) -> int:
    """Exact g(B) = n(B) - 1 for a connected cluster (singleton: 0)."""
    if isinstance(cluster, BondCluster):
        return cluster.g
    return BondCluster.from_sites(cluster).g


def walk_g(sites: Iterable[Site]) -> int:
    """g = n - 1 for an arbitrary (possibly disconnected) site set.

    Used by the coupling-table machinery, where interaction supports such as a
    pair at distance sqrt(2) are legitimate monomial supports even though they
    are not connected clusters.
    """
    pts = sorted(set(tuple(s) for s in sites))
    if len(pts) <= 1:
        return 0
    return closed_walk_length(pts) - 1


def enumerate_clusters(volume: Volume, anchor: Site, max_g: int) -> list[BondCluster]:
    """All connected clusters through ``anchor`` inside the volume with g <= max_g.

    Since g(B) >= |B| - 1, only sets of at most max_g + 1 sites are candidates.
    Enumeration of connected supersets follows the standard rooted scheme that
    produces each subset exactly once.
    """
    if max_g > 8:
        raise ValueError("enumerate_clusters capped at max_g <= 8")
    if not volume.contains_padded(anchor):
        raise ValueError("anchor outside volume")
    max_size = max_g + 1
    results: list[BondCluster] = []
    seen: set[frozenset] = set()

    def neighbors(s: Site) -> list[Site]:
        return [
            (s[0] + d[0], s[1] + d[1], s[2] + d[2])
            for d in NEIGHBOR_STEPS
            if volume.contains_padded((s[0] + d[0], s[1] + d[1], s[2] + d[2]))
        ]

    def grow(current: frozenset, frontier: list[Site], banned: set):
        if current in seen:
            return
        seen.add(current)
        cl = BondCluster.from_sites(current)
        if cl.g <= max_g:
            results.append(cl)
        if len(current) == max_size:
            return
        local_banned = set(banned)
        for cand in frontier:
            if cand in current or cand in local_banned:
                continue
            new = current | {cand}
            new_frontier = frontier + [n for n in neighbors(cand) if n not in new]
            grow(frozenset(new), new_frontier, local_banned)
            local_banned.add(cand)

    grow(frozenset({anchor}), neighbors(anchor), set())
    results.sort(key=lambda c: (len(c.sites), sorted(c.sites)))
    return results


def run_config_block(volume: Volume, bc: str) -> str:
    """Serialize the (volume, bc) pair to the JSON run-config block."""
    return json.dumps(volume.to_json(bc=bc), sort_keys=True)


def parse_run_config_block(text: str) -> tuple[Volume, str]:
    doc = json.loads(text)
    bc = doc.get("bc")
    if bc not in VALID_BC:
        raise ValueError(f"bc must be one of {VALID_BC}")
    return Volume.from_json(doc), bc
