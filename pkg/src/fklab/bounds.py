"""Numeric evaluation of the explicit constant chains behind the convergence
bounds: the geometric circuit-weight sequence C_j, the polymer-gas chain
(k0, alpha, a0, C3, C4, a1, q, Z_pol) and its feasibility thresholds, and
decay audits of extracted coupling tables.

The source bounds leave several constants symbolic; this module takes them as
explicit inputs with documented defaults (c = 1/2 in U - 1 >= cU, and the
Peierls constant c0 = 0.4 motivated by the contour audit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quantum import CouplingTable

#: Connectivity constant of the walk-counting bound in d = 3: (2d)^2.
C_D = 36.0


# ---------------------------------------------------------------------------
# Circuit-weight sequence
# ---------------------------------------------------------------------------


@dataclass
class CjReport:
    ratio: float          # 2dt/(cU)
    c0: float             # e^(-beta c U)
    tail_sum: float       # sum_{j>=2} C_j
    total: float          # c0 + tail
    converges: bool
    values: dict = field(default_factory=dict)


def cj_sequence(d: int, t: float, U: float, beta: float, c: float = 0.5, jmax: int = 12) -> CjReport:
    """C_j = (2dt/(cU))^j for j >= 2 and C_0 = e^(-beta c U).

    Reports the geometric tail sum and whether the total stays below one,
    which is the convergence condition of the circuit expansion.
    """
    if not (0.0 < c < 1.0):
        raise ValueError("c must lie in (0, 1)")
    if U <= 1.0:
        raise ValueError("U must exceed 1")
    rho = 2.0 * d * t / (c * U)
    c0 = math.exp(-beta * c * U)
    tail = rho * rho / (1.0 - rho) if rho < 1.0 else math.inf
    values = {0: c0}
    for j in range(2, jmax + 1):
        values[j] = rho**j
    total = c0 + tail
    return CjReport(ratio=rho, c0=c0, tail_sum=tail, total=total,
                    converges=total < 1.0, values=values)


# ---------------------------------------------------------------------------
# Polymer chain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolymerInputs:
    """Inputs of the polymer convergence chain.

    ``lam`` plays the role of the small parameter 1/U, ``b = beta * lam``;
    ``a`` is the free exponent (2 at the end of the proof) and ``c_d`` the
    walk-connectivity constant 36.
    """

    C1: float
    C2: float
    lam: float
    b: float
    a: float = 2.0
    c_d: float = C_D

    def __post_init__(self):
        if min(self.C1, self.C2, self.lam, self.b) <= 0:
            raise ValueError("C1, C2, lambda, b must be positive")

    @property
    def beta(self) -> float:
        return self.b / self.lam


@dataclass
class ConvergenceReport:
    k0: int | None
    alpha: float | None
    a0: float | None
    C3: float | None
    C4: float | None
    a_prime: float | None
    a_double_prime: float | None
    a1: float | None
    q: float | None
    zpol_bound: float | None
    cond1: bool
    cond2: bool
    cond4: bool

    @property
    def feasible(self) -> bool:
        return self.cond1 and self.cond2


def polymer_report(inp: PolymerInputs) -> ConvergenceReport:
    """Evaluate the whole constant chain of the polymer-gas bound.

    k0 is the smallest positive integer with C2*beta*(lam*c_d*e^a)^k0 <= 1;
    then alpha <= 1 by construction,

        C3 = C2 c_d^3 / (1 - c_d lam)            [needs c_d lam < 1]
        a0 = beta (C1 lam - C3 lam^3) - a
        C4 = (k0+1) c_d^(k0+1)
        a'' = a + 1/4,  z = lam e^a
        a1 = k0 c_d z / (1 - c_d z)^2            [needs c_d z < 1]
        q  = a0 - log c_d - a1 - a'' C4

    and Z_pol <= 2 C4 e^(-q) / (1 - e^(-q))^2 whenever q > 0.  Infeasible
    conditions are reported as flags rather than producing garbage numbers.
    """
    cd, lam, a = inp.c_d, inp.lam, inp.a
    cond1 = cd * lam < 1.0
    z = lam * math.exp(a)
    cond2 = cd * z < 1.0
    if not cond2:
        return ConvergenceReport(
            k0=None, alpha=None, a0=None, C3=None, C4=None,
            a_prime=None, a_double_prime=None, a1=None, q=None, zpol_bound=None,
            cond1=cond1, cond2=False, cond4=False,
        )
    beta = inp.beta
    base = cd * z  # = lam * c_d * e^a
    k0 = 1
    while inp.C2 * beta * base**k0 > 1.0:
        k0 += 1
        if k0 > 10_000:
            raise ArithmeticError("k0 search did not terminate")
    alpha = inp.C2 * beta * base**k0

    C3 = inp.C2 * cd**3 / (1.0 - cd * lam) if cond1 else None
    a0 = beta * (inp.C1 * lam - C3 * lam**3) - a if cond1 else None
    C4 = (k0 + 1) * cd ** (k0 + 1)
    a_prime = a + math.log(2.0) / 3.0
    a_dd = a + 0.25
    a1 = k0 * cd * z / (1.0 - cd * z) ** 2
    q = (a0 - math.log(cd) - a1 - a_dd * C4) if a0 is not None else None
    cond4 = q is not None and q > 0.0
    zpol = 2.0 * C4 * math.exp(-q) / (1.0 - math.exp(-q)) ** 2 if cond4 else None
    return ConvergenceReport(
        k0=k0, alpha=alpha, a0=a0, C3=C3, C4=C4,
        a_prime=a_prime, a_double_prime=a_dd, a1=a1, q=q, zpol_bound=zpol,
        cond1=cond1, cond2=cond2, cond4=cond4,
    )


def q_of_b(C1: float, C2: float, lam: float, b: float, a: float = 2.0) -> float | None:
    rep = polymer_report(PolymerInputs(C1=C1, C2=C2, lam=lam, b=b, a=a))
    return rep.q


def big_b(C1: float, C2: float, c_d: float = C_D) -> float:
    """B = (1 + sqrt(1 + 4 c_d C2 / C1)) / 2; always exceeds one."""
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * c_d * C2 / C1))


def lambda0(C1: float, C2: float, a: float = 2.0, c_d: float = C_D) -> float:
    """Feasibility threshold lambda_0 = (B c_d^2 e^a)^(-1)."""
    return 1.0 / (big_b(C1, C2, c_d) * c_d**2 * math.exp(a))


@dataclass
class B0Result:
    b0: float
    lambda0: float
    B: float


def find_b0(C1: float, C2: float, lam: float, a: float = 2.0,
            b_hi: float = 1e24, rel_tol: float = 1e-7) -> B0Result:
    """Smallest b with q(b) > 0, bracketed by bisection to rel_tol.

    Requires lam below the lambda_0 threshold.  q is piecewise increasing in b
    (it only drops at the sparse jumps of k0), so the first sign change on a
    geometric grid brackets b0.  The thresholds are astronomically large:
    the chain pays c_d^(k0+1) with c_d = 36, so b0 is typically 1e10..1e15.
    """
    lam0 = lambda0(C1, C2, a)
    if lam >= lam0:
        raise ValueError(f"lambda must be below lambda0 = {lam0:.6g}")
    B = big_b(C1, C2)

    def q(b: float) -> float:
        val = q_of_b(C1, C2, lam, b, a)
        if val is None:
            return -math.inf
        return val

    b_lo = 1e-6
    if q(b_lo) > 0:
        return B0Result(b0=b_lo, lambda0=lam0, B=B)
    grid = b_lo
    prev = b_lo
    while grid < b_hi:
        grid *= 1.5
        if q(grid) > 0:
            break
        prev = grid
    else:
        raise ValueError("no sign change of q up to b_hi")
    lo, hi = prev, grid
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if q(mid) > 0:
            hi = mid
        else:
            lo = mid
    return B0Result(b0=hi, lambda0=lam0, B=B)


def cprime_curve(C1: float, C2: float, b_values, a: float = 2.0, c_d: float = C_D,
                 log: bool = False):
    """The closing decay curve C'(b) of the polymer bound, on a grid.

    Evaluated at lambda = lambda_0 with the continuous choice of k0; the
    prefactor grows sublinearly (power r < 1 of b with a log), so the whole
    expression is driven to zero by e^(-q(b)) as b grows.  The drop past the
    feasibility threshold is so steep that linear values underflow within a
    relative window of ~1e-15; ``log=True`` returns log C'(b) instead, which
    stays representable (infeasible points give +inf either way).
    """
    lam0 = lambda0(C1, C2, a, c_d)
    B = big_b(C1, C2, c_d)
    r = math.log(c_d) / math.log(B * c_d)
    d0 = C2 * c_d * math.exp(a)
    X = C1 - C2 * c_d**3 * lam0**2 / (1.0 - c_d * lam0)
    out = []
    for b in b_values:
        k0bar = 1.0 + math.log(d0 * b) / math.log(B * c_d)
        A = (
            a + math.log(c_d)
            + k0bar * lam0 * math.exp(a) / (1.0 - c_d * lam0 * math.exp(a)) ** 2
            + c_d * (a + 0.25) * (k0bar + 1.0) * c_d**k0bar
        )
        qb = b * X - A
        if qb <= 0:
            out.append((b, math.inf))
            continue
        log_pref = (
            math.log(2.0) + 2.0 * math.log(c_d)
            + math.log(2.0 + math.log(C1 * b) / math.log(B * c_d))
            + r * math.log(C1 * b)
        )
        log_val = log_pref - qb - 2.0 * math.log1p(-math.exp(-min(qb, 700.0)))
        out.append((b, log_val if log else math.exp(log_val) if log_val > -745 else 0.0))
    return out


# ---------------------------------------------------------------------------
# Decay audits of coupling tables
# ---------------------------------------------------------------------------


@dataclass
class DecayAudit:
    c1: float | None          # fitted decay base, bound = c2t * (c1/U)^g
    c2t: float | None         # fitted prefactor
    violations: list
    pair_exponent_ok: bool | None
    trivial: bool


def decay_audit(table: CouplingTable, table_2u: CouplingTable | None = None,
                tiny: float = 1e-13) -> DecayAudit:
    """Fit |coupling| <= c2t (c1/U)^g to a coupling table and audit it.

    With a companion table at doubled U the audit also checks the pair-cluster
    refinement: after removing the explicit 1/(4U) part, nearest-neighbour
    couplings must decay with exponent 3, i.e. drop by at least 4x (expected
    8x) when U doubles.
    """
    levels: dict = {}
    for e in table.entries:
        if e.size < 2:
            continue
        levels[e.g] = max(levels.get(e.g, 0.0), abs(e.value))
    live = {g: v for g, v in levels.items() if v > tiny}
    if not live:
        return DecayAudit(c1=None, c2t=None, violations=[], pair_exponent_ok=None, trivial=True)
    if len(live) == 1:
        ((g, v),) = live.items()
        c1, c2t = None, v
    else:
        gs = np.array(sorted(live))
        logs = np.log([live[g] for g in gs])
        slope, _ = np.polyfit(gs, logs, 1)
        c1 = table.U * math.exp(slope)
        c2t = max(live[g] / (c1 / table.U) ** g for g in gs)
    violations = []
    if c1 is not None:
        for e in table.entries:
            if e.size >= 2 and abs(e.value) > c2t * (c1 / table.U) ** e.g * (1 + 1e-9):
                violations.append(e)

    pair_ok = None
    if table_2u is not None:
        if abs(table_2u.U - 2 * table.U) > 1e-9:
            raise ValueError("companion table must be at doubled U")
        def pair_tail(t: CouplingTable) -> float:
            best = 0.0
            for e in t.entries:
                if e.size == 2 and e.g == 1:
                    best = max(best, abs(abs(e.value) - 1.0 / (4.0 * t.U)))
            return best
        t1, t2 = pair_tail(table), pair_tail(table_2u)
        pair_ok = (t2 < tiny) or (t1 / t2 >= 4.0)
    return DecayAudit(c1=c1, c2t=c2t, violations=violations,
                      pair_exponent_ok=pair_ok, trivial=False)
