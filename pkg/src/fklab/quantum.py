"""Exact quantum side: the itinerant-electron Hamiltonian at fixed ion
configuration, effective ionic energies from full Fock-space traces, and the
extraction of multi-spin couplings by Walsh (Mobius) inversion.

The appendix-style trajectory sums are deliberately replaced by dense spectral
decompositions per electron-number block; at desk scale this is exact and the
decay bounds become something to verify rather than to assume.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .lattice import Site, coordinate_sum, is_connected, walk_g

MAX_ELECTRON_SITES = 14
MAX_ION_CONFIGS = 1 << 12


@dataclass(frozen=True)
class FKParameters:
    """Couplings of the itinerant model; energies in units of the hopping.

    The half-filled neutral preset sets both chemical potentials to U.
    """

    U: float
    beta: float
    t: float = 1.0
    mu_e: float | None = None
    mu_i: float | None = None

    def __post_init__(self):
        if self.mu_e is None:
            object.__setattr__(self, "mu_e", self.U)
        if self.mu_i is None:
            object.__setattr__(self, "mu_i", self.U)

    @property
    def half_filled(self) -> bool:
        return self.mu_e == self.U and self.mu_i == self.U


class FockBasis:
    """Occupation bitstrings over an ordered site list, grouped by electron number."""

    def __init__(self, sites: Sequence[Site]):
        sites = [tuple(s) for s in sites]
        if len(set(sites)) != len(sites):
            raise ValueError("duplicate sites")
        if len(sites) > MAX_ELECTRON_SITES:
            raise ValueError(f"electron problem capped at {MAX_ELECTRON_SITES} sites")
        self.sites = sorted(sites)
        self.index = {s: i for i, s in enumerate(self.sites)}
        self.L = len(self.sites)

    @property
    def dimension(self) -> int:
        return 1 << self.L

    def bonds(self) -> list[tuple[int, int]]:
        out = []
        for i, s in enumerate(self.sites):
            for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                t = (s[0] + d[0], s[1] + d[1], s[2] + d[2])
                j = self.index.get(t)
                if j is not None:
                    out.append((i, j))
        return out

    def sector_states(self, n: int) -> list[int]:
        return [
            sum(1 << i for i in occ)
            for occ in itertools.combinations(range(self.L), n)
        ]


def _hop_sign(state: int, i: int, j: int) -> int:
    """Fermionic sign of c+_i c_j on ``state`` (bit j set, bit i clear)."""
    lo, hi = (i, j) if i < j else (j, i)
    mask = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
    return -1 if bin(state & mask).count("1") % 2 else 1


@dataclass
class FKHamiltonian:
    """Block-diagonal real symmetric Hamiltonian in the occupation basis."""

    basis: FockBasis
    ion: dict                       # site -> 0/1
    params: FKParameters
    blocks: dict = field(default_factory=dict)  # n -> (states, matrix)

    def eigenvalues(self) -> np.ndarray:
        out = []
        for n in sorted(self.blocks):
            _, mat = self.blocks[n]
            if mat.shape[0] == 1:
                out.append(np.array([mat[0, 0]]))
            else:
                out.append(np.linalg.eigvalsh(mat))
        return np.concatenate(out)


def build_hamiltonian(sites: Sequence[Site], ion_config: dict, params: FKParameters) -> FKHamiltonian:
    """Assemble H = 2U sum W n - mu_e sum n - mu_i sum W - t sum (c+c + h.c.).

    ``ion_config`` maps each site to W(x) in {0,1}.  The matrix is real
    symmetric and block diagonal in the electron number.
    """
    basis = FockBasis(sites)
    W = np.array([int(ion_config[s]) for s in basis.sites], dtype=np.int64)
    if not np.all((W == 0) | (W == 1)):
        raise ValueError("ion occupations must be 0/1")
    onsite = 2.0 * params.U * W - params.mu_e
    classical = -params.mu_i * float(W.sum())
    bonds = [(i, j) for (i, j) in FockBasis(sites).bonds() if i < j]

    ham = FKHamiltonian(basis=basis, ion={s: int(ion_config[s]) for s in basis.sites}, params=params)
    for n in range(basis.L + 1):
        states = basis.sector_states(n)
        pos = {s: a for a, s in enumerate(states)}
        dim = len(states)
        mat = np.zeros((dim, dim))
        for a, st in enumerate(states):
            diag = classical
            rem = st
            while rem:
                bit = rem & -rem
                diag += onsite[bit.bit_length() - 1]
                rem ^= bit
            mat[a, a] = diag
            for (i, j) in bonds:
                # c+_i c_j moves an electron j -> i
                if (st >> j) & 1 and not (st >> i) & 1:
                    st2 = (st ^ (1 << j)) | (1 << i)
                    b = pos[st2]
                    amp = -params.t * _hop_sign(st, i, j)
                    mat[b, a] += amp
                    mat[a, b] += amp
        ham.blocks[n] = (states, mat)
    return ham


def effective_energy(sites: Sequence[Site], ion_config: dict, params: FKParameters) -> float:
    """H_eff = -(1/beta) log Tr exp(-beta H), traced over the full Fock space.

    Overflow-guarded by log-sum-exp; finite for all inputs with a finite
    spectrum.
    """
    ham = build_hamiltonian(sites, ion_config, params)
    ev = ham.eigenvalues()
    if not np.all(np.isfinite(ev)):
        raise FloatingPointError("non-finite spectrum")
    m = float(np.min(ev))
    z = np.sum(np.exp(-params.beta * (ev - m)))
    return m - math.log(z) / params.beta


def neel_ion(site: Site) -> int:
    """Checkerboard ion occupation: W = 1 on the even sublattice."""
    return 1 if coordinate_sum(site) % 2 == 0 else 0


@dataclass
class CouplingEntry:
    sites: tuple
    value: float
    g: int
    connected: bool

    @property
    def size(self) -> int:
        return len(self.sites)


@dataclass
class CouplingTable:
    """Walsh coefficients of S -> H_eff(beta, S) over a window of sites.

    ``entries`` hold the monomial couplings up to the requested g cutoff
    (by the closed-walk measure, which is defined for any support, connected
    or not); the full coefficient vector is kept so that re-synthesis
    reproduces H_eff exactly on every configuration.
    """

    window: tuple
    beta: float
    U: float
    t: float
    constant: float
    entries: list
    _coeffs: np.ndarray | None = None
    max_g: int = 0

    def value(self, sites: Iterable[Site]) -> float:
        key = tuple(sorted(tuple(s) for s in sites))
        for e in self.entries:
            if e.sites == key:
                return e.value
        raise KeyError(f"no entry for {key}")

    def by_g(self) -> dict:
        out: dict = {}
        for e in self.entries:
            out.setdefault(e.g, []).append(e)
        return out

    def synthesize(self, ion_config: dict) -> float:
        """Reconstruct H_eff for an ion configuration from all coefficients."""
        if self._coeffs is None:
            raise ValueError("table was loaded without the full coefficient vector")
        m = 0
        for i, s in enumerate(self.window):
            if ion_config[s]:
                m |= 1 << i
        total = 0.0
        w = len(self.window)
        for a in range(1 << w):
            sign = 1 - 2 * (bin(a & ~m & ((1 << w) - 1)).count("1") % 2)
            total += self._coeffs[a] * sign
        return float(total)

    def to_json(self) -> dict:
        return {
            "window": [list(s) for s in self.window],
            "beta": self.beta,
            "U": self.U,
            "t": self.t,
            "constant": self.constant,
            "max_g": self.max_g,
            "couplings": [
                {"cluster": [list(s) for s in e.sites], "g": e.g,
                 "connected": e.connected, "value": e.value}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CouplingTable":
        entries = [
            CouplingEntry(
                sites=tuple(tuple(s) for s in c["cluster"]),
                value=float(c["value"]),
                g=int(c["g"]),
                connected=bool(c["connected"]),
            )
            for c in doc["couplings"]
        ]
        return cls(
            window=tuple(tuple(s) for s in doc["window"]),
            beta=float(doc["beta"]), U=float(doc["U"]), t=float(doc["t"]),
            constant=float(doc["constant"]), entries=entries, max_g=int(doc["max_g"]),
        )


def _walsh_transform(values: np.ndarray) -> np.ndarray:
    """In-place fast Walsh-Hadamard butterfly; length must be a power of two."""
    a = values.copy()
    n = a.shape[0]
    h = 1
    while h < n:
        a = a.reshape(-1, 2 * h)
        left = a[:, :h].copy()
        right = a[:, h:].copy()
        a[:, :h] = left + right
        a[:, h:] = left - right
        a = a.reshape(n)
        h *= 2
    return a


def extract_couplings(
    sites: Sequence[Site],
    params: FKParameters,
    max_g: int,
    window: Sequence[Site] | None = None,
    frozen=neel_ion,
) -> CouplingTable:
    """Mobius inversion of S -> H_eff over the +-1 monomial basis.

    Every ion configuration of the window (exterior frozen to the checkerboard
    pattern by default) is solved exactly; the Walsh transform of the energy
    vector gives the coupling of each spin monomial.  The coefficient of the
    monomial on support A appears at order U^(-g(A)), with g measured by the
    minimal closed walk through A.
    """
    sites = [tuple(s) for s in sites]
    window = [tuple(s) for s in (window if window is not None else sites)]
    w = len(window)
    if 1 << w > MAX_ION_CONFIGS:
        raise ValueError(f"window of {w} sites exceeds {MAX_ION_CONFIGS} ion configurations")
    wset = set(window)
    for s in window:
        if s not in set(sites):
            raise ValueError("window must be a subset of the electron sites")

    energies = np.empty(1 << w)
    for m in range(1 << w):
        ion = {}
        for s in sites:
            if s in wset:
                ion[s] = (m >> window.index(s)) & 1
            else:
                ion[s] = frozen(s)
        energies[m] = effective_energy(sites, ion, params)

    # Phi_A = (-1)^|A| * WHT(F)[A] / 2^w  for s' = 2W - 1
    coeffs = _walsh_transform(energies) / float(1 << w)
    for a in range(1 << w):
        if bin(a).count("1") % 2:
            coeffs[a] = -coeffs[a]

    entries = []
    for a in range(1, 1 << w):
        support = tuple(sorted(window[i] for i in range(w) if (a >> i) & 1))
        g = walk_g(support)
        if g > max_g:
            continue
        entries.append(
            CouplingEntry(
                sites=support,
                value=float(coeffs[a]),
                g=g,
                connected=is_connected(support),
            )
        )
    entries.sort(key=lambda e: (e.g, e.size, e.sites))
    return CouplingTable(
        window=tuple(window),
        beta=params.beta,
        U=params.U,
        t=params.t,
        constant=float(coeffs[0]),
        entries=entries,
        _coeffs=coeffs,
        max_g=max_g,
    )


@dataclass
class DecayReport:
    levels: dict                 # g -> max |coupling|
    trivial: bool
    slope: float | None = None
    c1: float | None = None     # prefactor of the fitted bound c1 * (c/U)^g
    c: float | None = None      # fitted decay base: |coupling| <~ (c/U)^g

    @property
    def decreasing(self) -> bool:
        gs = sorted(self.levels)
        vals = [self.levels[g] for g in gs]
        return all(b < a for a, b in zip(vals, vals[1:]))


def verify_decay(table: CouplingTable, tiny: float = 1e-13) -> DecayReport:
    """Per-g maxima of |coupling| and an affine fit of their logarithms.

    The fitted pair (c1, c) realizes |coupling| <= c1 (c/U)^g on the table;
    a clean exponential decay shows up as c/U < 1.
    """
    levels: dict = {}
    for e in table.entries:
        if e.size < 2:
            continue
        levels[e.g] = max(levels.get(e.g, 0.0), abs(e.value))
    live = {g: v for g, v in levels.items() if v > tiny}
    if len(live) == 0:
        return DecayReport(levels=levels, trivial=True)
    if len(live) == 1:
        ((g, v),) = live.items()
        return DecayReport(levels=levels, trivial=False, slope=None, c1=v, c=None)
    gs = np.array(sorted(live))
    logs = np.log([live[g] for g in gs])
    slope, intercept = np.polyfit(gs, logs, 1)
    c = table.U * math.exp(slope)
    # raise the prefactor until the bound envelopes every level
    c1 = max(live[g] / (c / table.U) ** g for g in gs)
    return DecayReport(levels=levels, trivial=False, slope=float(slope), c1=float(c1), c=float(c))
