"""Joint measurability, restricted (state-subset) compatibility, degrees of
incompatibility, and the incompatibility dimension of the mutually unbiased
qubit pair restricted to the equatorial disc.

Effect-cone membership for the disc is second-order-cone, handled by a
ladder of polyhedral approximations: an inscribed-vertex relaxation whose
infeasibility certifies incompatibility, and a shrunk-cut tightening whose
feasible points are exactly valid and certify compatibility.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .gpt_core import Theory, make_disc
from .numerics import LinearProgram, solve_lp, bisect
from .observables import JointObservable, Observable, measure

log = logging.getLogger("gpt_lab")

SQ2INV = 1.0 / math.sqrt(2.0)


# -- domain types -------------------------------------------------------


@dataclass
class StateSubset:
    generators: list
    affine_dim: int = field(init=False)

    def __post_init__(self):
        self.generators = [np.asarray(g, float) for g in self.generators]
        if not self.generators:
            raise ValueError("empty state subset")
        base = self.generators[0]
        diffs = np.array([g - base for g in self.generators[1:]])
        if len(diffs) == 0:
            self.affine_dim = 0
        else:
            s = np.linalg.svd(diffs, compute_uv=False)
            self.affine_dim = int(np.sum(s > 1e-9))


@dataclass
class QubitPairParams:
    t: float
    phi0: float
    psi0: float
    xi1_min: float = field(init=False)
    xi1_max: float = field(init=False)
    xi2_min: float = field(init=False)
    xi2_max: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.phi0 < math.pi / 2 and 0.0 < self.psi0 < math.pi / 2):
            raise ValueError("angles must lie strictly inside (0, pi/2)")
        (self.xi1_min, self.xi1_max, self.xi2_min, self.xi2_max) = xi_bounds(
            self.t, self.phi0, self.psi0
        )


@dataclass
class DimensionReport:
    t: float
    chi_incomp: int | str
    chi_comp: int | str
    witness: StateSubset | None = None
    t0_estimate: float | None = None
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "t": self.t,
            "chi_incomp": self.chi_incomp,
            "chi_comp": self.chi_comp,
            "witness": None
            if self.witness is None
            else [g.tolist() for g in self.witness.generators],
            "t0_estimate": self.t0_estimate,
            "details": self.details,
        }


# -- LP assembly helpers ------------------------------------------------


def _finite_nonneg_rows(t: Theory, ncells: int, dim: int):
    """-m_c(omega) <= 0 for every cell c and pure state omega."""
    pts = t.pure_states @ t.g_matrix
    rows = []
    for c in range(ncells):
        for p in pts:
            row = np.zeros(ncells * dim)
            row[c * dim : (c + 1) * dim] = -p
            rows.append(row)
    return np.array(rows), np.zeros(len(rows))


def _disc_cut_rows(ncells: int, k_cuts: int, shrink: bool):
    """Nonnegativity cuts for disc-effect cells.

    Relaxed (shrink=False): m(omega_theta) >= 0 at k sampled boundary
    angles; a superset of the true cone, so infeasibility is a certificate.
    Shrunk (shrink=True): the same cuts scaled by cos(pi/k) on the z part,
    a subset of the true cone, so feasible points are exactly valid.
    """
    s = math.cos(math.pi / k_cuts) if shrink else 1.0
    rows = []
    for c in range(ncells):
        for j in range(k_cuts):
            th = 2 * math.pi * j / k_cuts
            row = np.zeros(ncells * 3)
            row[c * 3 + 0] = -math.cos(th)
            row[c * 3 + 1] = -math.sin(th)
            row[c * 3 + 2] = -s
            rows.append(row)
    return np.array(rows), np.zeros(len(rows))


def _joint_equalities(theory, f: Observable, g: Observable, states=None):
    """Marginal equality rows over cell coordinate variables.

    With states=None the equalities are exact (coordinatewise); otherwise
    they are imposed only as statistics on the given states.
    """
    na, nb = len(f.effects), len(g.effects)
    dim = theory.dim
    nvars = na * nb * dim
    rows, rhs = [], []

    def cellslice(a, b):
        c = a * nb + b
        return slice(c * dim, (c + 1) * dim)

    if states is None:
        for a in range(na):
            for d in range(dim):
                row = np.zeros(nvars)
                for b in range(nb):
                    row[cellslice(a, b)][d] = 1.0
                rows.append(row)
                rhs.append(f.effects[a][d])
        for b in range(nb):
            for d in range(dim):
                row = np.zeros(nvars)
                for a in range(na):
                    row[cellslice(a, b)][d] = 1.0
                rows.append(row)
                rhs.append(g.effects[b][d])
    else:
        # total must still be the unit effect, exactly
        for d in range(dim):
            row = np.zeros(nvars)
            for a in range(na):
                for b in range(nb):
                    row[cellslice(a, b)][d] = 1.0
            rows.append(row)
            rhs.append(theory.unit_effect[d])
        gmat = theory.g_matrix
        for w in states:
            wv = gmat @ np.asarray(w, float)
            for a in range(na):
                row = np.zeros(nvars)
                for b in range(nb):
                    row[cellslice(a, b)] += wv
                rows.append(row)
                rhs.append(theory.pair(f.effects[a], w))
            for b in range(nb):
                row = np.zeros(nvars)
                for a in range(na):
                    row[cellslice(a, b)] += wv
                rows.append(row)
                rhs.append(theory.pair(g.effects[b], w))
    return np.array(rows), np.array(rhs)


def _grid_from_solution(theory, x, na, nb) -> JointObservable:
    dim = theory.dim
    grid = []
    for a in range(na):
        row = []
        for b in range(nb):
            c = a * nb + b
            m = np.array(x[c * dim : (c + 1) * dim])
            if theory.kind == "Disc":
                # project residual cone violations (~1e-8 from the cut
                # generation) radially onto the boundary
                nv = math.hypot(m[0], m[1])
                if nv > m[2]:
                    s = m[2] / nv if m[2] > 0 else 0.0
                    m[0] *= s
                    m[1] *= s
                    m[2] = max(m[2], 0.0)
            row.append(m)
        grid.append(row)
    return JointObservable(theory, grid, atol=1e-5)


def _disc_cells_exactly_valid(x, ncells, tol=1e-8) -> bool:
    for c in range(ncells):
        mx, my, mz = x[c * 3 : (c + 1) * 3]
        if mz - math.hypot(mx, my) < -tol:
            return False
    return True


def _joint_feasible(theory, f, g, states=None, tol=1e-9, objective=None):
    """Solve the joint-observable (possibly S0-restricted) feasibility
    problem.  Returns (verdict, x) with verdict True, False, or None when
    the disc cut generation cannot settle a boundary-pinned instance."""
    na, nb = len(f.effects), len(g.effects)
    dim = theory.dim
    nvars = na * nb * dim
    a_eq, b_eq = _joint_equalities(theory, f, g, states)

    if theory.kind != "Disc":
        a_ub, b_ub = _finite_nonneg_rows(theory, na * nb, dim)
        p = LinearProgram(nvars, objective=objective, a_eq=a_eq, b_eq=b_eq,
                          a_ub=a_ub, b_ub=b_ub)
        r = solve_lp(p, tol)
        if r.status in ("feasible", "optimal"):
            return True, r.x
        return False, None

    # supporting-cut generation for the disc effect cone.  All cuts are valid
    # for the true cone, so infeasibility is always a certificate; feasibility
    # is accepted once no cell violates the cone beyond 1e-10.
    ncells = na * nb
    a_ub, b_ub = _disc_cut_rows(ncells, 64, shrink=False)
    rows = list(a_ub)
    best_x, best_viol = None, math.inf
    for _ in range(25):
        p = LinearProgram(nvars, objective=objective, a_eq=a_eq, b_eq=b_eq,
                          a_ub=np.array(rows), b_ub=np.zeros(len(rows)))
        r = solve_lp(p, tol)
        if r.status == "infeasible":
            return False, None
        new = []
        viol = 0.0
        for c in range(ncells):
            mx, my, mz = r.x[c * 3 : (c + 1) * 3]
            nv = math.hypot(mx, my)
            viol = max(viol, nv - mz)
            if nv - mz > 1e-7:
                row = np.zeros(nvars)
                row[c * 3 + 0] = mx / nv
                row[c * 3 + 1] = my / nv
                row[c * 3 + 2] = -1.0
                new.append(row)
        if viol < best_viol:
            best_x, best_viol = r.x, viol
        if not new:
            return True, r.x
        rows.extend(new)
    if best_viol <= 1e-6:
        log.info("disc cut generation stalled at violation %.2e; accepting", best_viol)
        return True, best_x
    log.info("disc cut generation undecided (violation %.2e)", best_viol)
    return None, None


# -- public operations --------------------------------------------------


def are_compatible(f: Observable, g: Observable, tol: float = 1e-9):
    """LP test for the existence of a joint observable.

    Returns (bool, JointObservable or None).  Boundary-pinned disc
    instances the cut generation cannot settle fall back to the exact
    algebraic criterion when both observables are binary.
    """
    if f.theory is not g.theory and f.theory.to_json() != g.theory.to_json():
        raise ValueError("observables live on different theories")
    ok, x = _joint_feasible(f.theory, f, g, tol=tol)
    if ok is None:
        if f.theory.kind == "Disc" and len(f.effects) == 2 and len(g.effects) == 2:
            return disc_binary_pair_compatible(f, g), None
        raise RuntimeError("joint feasibility undecided for this instance")
    if ok and x is not None:
        return True, _grid_from_solution(f.theory, x, len(f.effects), len(g.effects))
    return ok, None


def disc_binary_pair_compatible(f: Observable, g: Observable) -> bool:
    """Exact algebraic joint-measurability test for two binary disc
    observables, via the biased-pair criterion in the embedding plane."""
    e1, e2 = f.effects[0], g.effects[0]
    w1, m1 = 2 * e1[2] - 1.0, np.array([2 * e1[0], 2 * e1[1], 0.0])
    w2, m2 = 2 * e2[2] - 1.0, np.array([2 * e2[0], 2 * e2[1], 0.0])
    return busch_unbiased_compatible(w1, m1, w2, m2)


def s0_compatible(f: Observable, g: Observable, s0: StateSubset, tol: float = 1e-9):
    """Compatibility of the pair restricted to the states in ``s0``.

    Returns (bool, (Observable, Observable) or None): the surrogate pair is
    read off the feasible joint's marginals.
    """
    if f.theory is not g.theory and f.theory.to_json() != g.theory.to_json():
        raise ValueError("observables live on different theories")
    ok, x = _joint_feasible(f.theory, f, g, states=s0.generators, tol=tol)
    if ok and x is not None:
        j = _grid_from_solution(f.theory, x, len(f.effects), len(g.effects))
        from .observables import marginals

        return True, marginals(j, atol=1e-5)
    return ok, None


def qubit_pair_compatible_closed_form(a, b) -> bool:
    """Unbiased qubit pair A^a, A^b: compatible iff |a+b| + |a-b| <= 2."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if np.linalg.norm(a) > 1 + 1e-12 or np.linalg.norm(b) > 1 + 1e-12:
        raise ValueError("Bloch vectors must lie in the unit ball")
    return np.linalg.norm(a + b) + np.linalg.norm(a - b) <= 2.0 + 1e-12


def busch_unbiased_compatible(w1: float, m1, w2: float, m2) -> bool:
    """Joint measurability of qubit effects (1/2)((1 + w_i) 1 + m_i.sigma).

    Evaluates (1 - F1^2 - F2^2)(1 - w1^2/F1^2 - w2^2/F2^2)
    <= (m1.m2 - w1 w2)^2 with the standard F_i; degenerate F_i -> 0 falls
    back to the factored boundary form.
    """
    m1 = np.asarray(m1, float)
    m2 = np.asarray(m2, float)
    c1, c2 = np.linalg.norm(m1), np.linalg.norm(m2)
    for w, c in ((w1, c1), (w2, c2)):
        if c > 1 - abs(w) + 1e-10:
            raise ValueError("invalid qubit effect parameters")
    f1 = _busch_F(w1, c1)
    f2 = _busch_F(w2, c2)
    dot = float(m1 @ m2)
    if f1 < 1e-12 or f2 < 1e-12:
        # F_i = 0 forces w_i = 0, C_i = 1 (a sharp observable), which is
        # jointly measurable with the other only when the axes are parallel
        return abs(dot) >= c1 * c2 - 1e-9
    lhs = (1 - f1 * f1 - f2 * f2) * (1 - (w1 / f1) ** 2 - (w2 / f2) ** 2)
    rhs = (dot - w1 * w2) ** 2
    return lhs <= rhs + 1e-12


def _busch_F(w: float, c: float) -> float:
    a = max((1 + w) ** 2 - c * c, 0.0)
    b = max((1 - w) ** 2 - c * c, 0.0)
    return 0.5 * (math.sqrt(a) + math.sqrt(b))


# -- the segment parameterization ---------------------------------------


def _w_and_C(t, phi0, psi0, xi):
    s = math.sin(phi0 - xi)
    if s <= 0:
        raise ValueError("sin(phi0 - xi) must be positive")
    c = t * math.sin(phi0) / s
    w = -t * math.cos(psi0) * math.sin(xi) / s
    return w, c


def _xi_min(t, phi0, psi0):
    """Negative root of the quadratic in sin(xi) solving 1 - w = C."""
    aa = t * t * math.cos(psi0) ** 2 - 2 * t * math.cos(phi0) * math.cos(psi0) + 1.0
    bb = -2 * t * math.sin(phi0) * (t * math.cos(psi0) - math.cos(phi0))
    cc = (t * t - 1.0) * math.sin(phi0) ** 2
    disc = bb * bb - 4 * aa * cc
    s = (-bb - math.sqrt(max(disc, 0.0))) / (2 * aa)
    s = min(max(s, -1.0), 0.0)
    # two angles share this sine; pick the admissible one by the residual
    cand = [math.asin(s)]
    other = -math.pi - math.asin(s)
    if other > -math.pi + phi0:
        cand.append(other)
    best, best_res = cand[0], math.inf
    for xi in cand:
        try:
            w, c = _w_and_C(t, phi0, psi0, xi)
        except ValueError:
            continue
        res = abs(1.0 - w - c)
        if res < best_res:
            best, best_res = xi, res
    return best


def _xi_max(t, phi0, psi0):
    """Solution of 1 + w = C on [0, phi0), i.e.
    sin(phi0) cos(xi) - (cos(phi0) + t cos(psi0)) sin(xi) = t sin(phi0)."""
    p = math.sin(phi0)
    q = math.cos(phi0) + t * math.cos(psi0)
    r = math.hypot(p, q)
    delta = math.atan2(q, p)
    arg = min(max(t * math.sin(phi0) / r, -1.0), 1.0)
    for xi in (-delta + math.acos(arg), -delta - math.acos(arg)):
        if -1e-12 <= xi < phi0:
            return max(xi, 0.0)
    raise ValueError("no admissible xi_max; angle bounds violated")


def xi_bounds(t: float, phi0: float, psi0: float):
    """(xi1_min, xi1_max, xi2_min, xi2_max) for the segment surrogates.

    xi2 bounds follow from the xi1 formulas under phi0 -> pi/2 - phi0.
    """
    if not (0.0 < phi0 < math.pi / 2 and 0.0 < psi0 < math.pi / 2):
        raise ValueError("angles must lie strictly inside (0, pi/2)")
    if not (0.0 < t <= 1.0):
        raise ValueError("t must lie in (0, 1]")
    xi1_min = _xi_min(t, phi0, psi0)
    xi1_max = _xi_max(t, phi0, psi0)
    xi2_min = _xi_min(t, math.pi / 2 - phi0, psi0)
    xi2_max = _xi_max(t, math.pi / 2 - phi0, psi0)
    return xi1_min, xi1_max, xi2_min, xi2_max


def z_function(t: float, phi0: float, psi0: float) -> float:
    """Z = (1 + sin(xi1+xi2))(1 + w1 + w2) - (1 - sin(xi1+xi2)) w1 w2 at
    the extremal pair (xi1_min, xi2_min).  Z <= 0 certifies that the
    extremal surrogate pair is compatible."""
    xi1, _, xi2, _ = xi_bounds(t, phi0, psi0)
    w1, _ = _w_and_C(t, phi0, psi0, xi1)
    w2, _ = _w_and_C(t, math.pi / 2 - phi0, psi0, xi2)
    s = math.sin(xi1 + xi2)
    return (1 + s) * (1 + w1 + w2) - (1 - s) * w1 * w2


def _segment_surrogates_all_incompatible(t, phi0, psi0) -> bool:
    """Closed-form segment-incompatibility test.

    Compatibility of the restricted pair reduces to compatibility of some
    admissible surrogate pair, and among those it suffices to test the
    extremal one at (xi1_min, xi2_min): incompatible iff
    (1 + s)(1 - w1 - w2) > (1 - s) w1 w2 with s = sin(xi1 + xi2);
    s -> 1 (anti-aligned axes reachable) always gives compatibility.
    """
    xi1_min, _, xi2_min, _ = xi_bounds(t, phi0, psi0)
    if xi1_min + xi2_min <= -math.pi / 2 + 1e-15:
        return False  # anti-aligned surrogates exist and are compatible
    w1, _ = _w_and_C(t, phi0, psi0, xi1_min)
    w2, _ = _w_and_C(t, math.pi / 2 - phi0, psi0, xi2_min)
    s = math.sin(xi1_min + xi2_min)
    if 1.0 - s < 1e-14:
        return False
    return (1 + s) * (1 - w1 - w2) > (1 - s) * w1 * w2 + 1e-12


# -- qubit-disc observables ---------------------------------------------


def disc_axis_observable(theory: Theory, t: float, angle: float) -> Observable:
    """A^{t v} with v = (cos angle, sin angle) mapped onto the disc."""
    u = theory.unit_effect
    plus = 0.5 * np.array([t * math.cos(angle), t * math.sin(angle), 1.0])
    return Observable(theory, [plus, u - plus], labels=["+", "-"])


def mutually_unbiased_pair(theory: Theory, t: float):
    return (
        disc_axis_observable(theory, t, 0.0),
        disc_axis_observable(theory, t, math.pi / 2),
    )


def _segment_states(theory, phi0, psi0):
    return [theory.disc_state(phi0 - psi0), theory.disc_state(phi0 + psi0)]


def incompatibility_dimension_qubit(
    t: float,
    grid: int = 512,
    tol: float = 1e-3,
    lp_spot_checks: int = 32,
    with_t0: bool = True,
) -> DimensionReport:
    """chi_incomp / chi_comp for the pair (A^{t x}, A^{t y}) on the disc.

    chi_incomp = 2 iff some boundary segment is S0-incompatible; segments
    are scanned with the closed-form surrogate criterion on a (phi0, psi0)
    grid (refined near sign changes) and spot-verified by the S0 LP.  A
    disagreement between the two certifiers aborts the scan.
    """
    if not (SQ2INV < t <= 1.0 + 1e-12):
        raise ValueError("t must lie in (1/sqrt 2, 1]")
    theory = make_disc(64)
    f, g = mutually_unbiased_pair(theory, t)

    incomp_cells = _incompatible_segments(t, grid)

    # independent LP certification on a deterministic spread of cells
    phis = [(i + 0.5) * (math.pi / 2) / 8 for i in range(8)]
    psis = [(i + 0.5) * (math.pi / 2) / 4 for i in range(4)]
    spot = list(itertools.product(phis, psis))[:lp_spot_checks]
    disagreements = []
    for phi0, psi0 in spot:
        proxy = _segment_surrogates_all_incompatible(t, phi0, psi0)
        ok, _ = s0_compatible(
            f, g, StateSubset(_segment_states(theory, phi0, psi0))
        )
        if ok is None:
            continue  # boundary-pinned instance the LP cannot settle
        if ok == proxy:  # LP says compatible while proxy says incompatible, or v.v.
            disagreements.append((phi0, psi0, proxy, ok))
    if disagreements:
        raise RuntimeError(
            "segment certifiers disagree; diagnostics: " + repr(disagreements)
        )

    witness = None
    if incomp_cells:
        phi0, psi0 = incomp_cells[0]
        states = _segment_states(theory, phi0, psi0)
        ok, _ = s0_compatible(f, g, StateSubset(states))
        if ok is True:
            raise RuntimeError(
                f"LP contradicts scan witness at {(phi0, psi0)}; aborting"
            )
        witness = StateSubset(states)
        chi_incomp = 2
    else:
        chi_incomp = 3

    chi_comp = 3 if chi_comp_plane_verified(theory, t) else "unverified"

    t0 = None
    if with_t0:
        t0 = estimate_t0(grid=max(64, grid // 4), tol=tol)
    return DimensionReport(
        t=t,
        chi_incomp=chi_incomp,
        chi_comp=chi_comp,
        witness=witness,
        t0_estimate=t0,
        details={"grid": grid, "n_incompatible_cells": len(incomp_cells)},
    )


def _incompatible_segments(t: float, grid: int):
    """Grid scan (vectorized closed forms) returning incompatible cells."""
    half = math.pi / 2
    phis = (np.arange(grid) + 0.5) * half / grid
    psis = (np.arange(grid) + 0.5) * half / grid
    pp, ss = np.meshgrid(phis, psis, indexing="ij")
    mask = _vectorized_proxy(t, pp, ss)
    hits = np.argwhere(mask)
    out = [(float(phis[i]), float(psis[j])) for i, j in hits[:64]]
    # refine near any sign change even if the coarse scan found nothing
    if not out:
        edge = np.argwhere(mask[:-1, :] != mask[1:, :])
        for i, j in edge[:16]:
            for dphi in np.linspace(-0.5, 0.5, 5):
                for dpsi in np.linspace(-0.5, 0.5, 5):
                    p0 = phis[i] + dphi * half / grid
                    q0 = psis[j] + dpsi * half / grid
                    if 0 < p0 < half and 0 < q0 < half:
                        if _segment_surrogates_all_incompatible(t, p0, q0):
                            out.append((p0, q0))
    return out


def _vectorized_proxy(t, phi0, psi0):
    """Vectorized version of the extremal-pair segment test."""

    def ximin(phi):
        aa = t * t * np.cos(psi0) ** 2 - 2 * t * np.cos(phi) * np.cos(psi0) + 1.0
        bb = -2 * t * np.sin(phi) * (t * np.cos(psi0) - np.cos(phi))
        cc = (t * t - 1.0) * np.sin(phi) ** 2
        s = (-bb - np.sqrt(np.maximum(bb * bb - 4 * aa * cc, 0.0))) / (2 * aa)
        s = np.clip(s, -1.0, 0.0)
        xa = np.arcsin(s)
        xb = -math.pi - xa
        wa, ca = _w_and_C_np(t, phi, psi0, xa)
        wb, cb = _w_and_C_np(t, phi, psi0, xb)
        ra = np.abs(1.0 - wa - ca)
        rb = np.where(xb > -math.pi + phi, np.abs(1.0 - wb - cb), np.inf)
        return np.where(ra <= rb, xa, xb)

    phibar = math.pi / 2 - phi0
    x1min = ximin(phi0)
    x2min = ximin(phibar)

    w1, _ = _w_and_C_np(t, phi0, psi0, x1min)
    w2, _ = _w_and_C_np(t, phibar, psi0, x2min)
    s = np.sin(x1min + x2min)
    incompatible = x1min + x2min > -math.pi / 2 + 1e-15
    incompatible &= 1.0 - s >= 1e-14
    incompatible &= (1 + s) * (1 - w1 - w2) > (1 - s) * w1 * w2 + 1e-12
    return incompatible


def _w_and_C_np(t, phi, psi0, xi):
    s = np.sin(phi - xi)
    c = t * np.sin(phi) / s
    w = -t * np.cos(psi0) * np.sin(xi) / s
    return w, c


def chi_comp_plane_verified(theory: Theory, t: float) -> bool:
    """The product construction G(x, y) = p(x) B(y), with p the first
    observable's statistics at a reference state, reproduces both
    observables on the Bloch-ball plane of states with fixed first-axis
    statistic, an affine-dimension-2 subset, so chi_comp = 3.

    Verified in full Bloch coordinates: effects (w, m) act on a state r
    as (1 + w + m.r)/2; plane generators span {r_x = 0}.
    """

    def val(w, m, r):
        return 0.5 * (1.0 + w + float(np.dot(m, r)))

    ea = (0.0, np.array([t, 0.0, 0.0]))  # first outcome of A^{tx}
    eb = (0.0, np.array([0.0, t, 0.0]))  # first outcome of A^{ty}
    plane = [np.zeros(3), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])]
    if StateSubset(plane).affine_dim != 2:
        return False
    r0 = plane[0]
    pa = [val(*ea, r0), 1.0 - val(*ea, r0)]
    # joint cells: G(x, y) = pa[x] * B(y); check validity and marginals
    cells = {}
    for xo in range(2):
        for yo in range(2):
            wb = eb[0] if yo == 0 else -eb[0]
            mb = eb[1] if yo == 0 else -eb[1]
            wc = pa[xo] * (1 + wb) - 1.0
            mc = pa[xo] * mb
            if np.linalg.norm(mc) > min(1 + wc, 1 - wc) + 1e-12:
                return False
            cells[(xo, yo)] = (wc, mc)
    for r in plane:
        pa_m = sum(val(*cells[(0, yo)], r) for yo in range(2))
        pb_m = sum(val(*cells[(xo, 0)], r) for xo in range(2))
        if abs(pa_m - val(*ea, r)) > 1e-10:
            return False
        if abs(pb_m - val(*eb, r)) > 1e-10:
            return False
    return True


def exists_incompatible_segment(t: float, grid: int = 128) -> bool:
    return bool(len(_incompatible_segments(t, grid)) > 0)


def estimate_t0(grid: int = 128, tol: float = 1e-3) -> float:
    """Bisection for the threshold above which some segment certifies
    chi_incomp = 2."""
    lo, hi = SQ2INV + 1e-6, 1.0
    if not exists_incompatible_segment(hi, grid):
        return hi
    if exists_incompatible_segment(lo, grid):
        return lo

    def pred(t):
        return 1.0 if exists_incompatible_segment(t, grid) else -1.0

    return bisect(pred, lo, hi, tol)


# -- degree of incompatibility ------------------------------------------


def degree_of_incompatibility(f: Observable, g: Observable, tol: float = 1e-4):
    """Largest uniform-noise weight keeping the fuzzed pair compatible.

    Returns (lambda, closed_form_upper_bound).  The bound is
    max over pure states of (max_i f_i + max_j g_j) - 1.
    """
    from .observables import fuzz

    if len(f.effects) != 2 or len(g.effects) != 2:
        raise ValueError("degree of incompatibility needs binary observables")

    bound = _lp_bound_states_max(f, g) - 1.0

    def compatible(lam):
        ok, _ = are_compatible(fuzz(f, lam), fuzz(g, lam))
        return ok

    if compatible(1.0):
        return 1.0, bound

    def pred(lam):
        return -1.0 if compatible(lam) else 1.0

    lam = bisect(pred, 0.0, 1.0, tol * 0.25)
    return lam, bound


def _lp_bound_states_max(f: Observable, g: Observable) -> float:
    t = f.theory
    if t.kind == "Disc":
        best = 0.0
        for ef in f.effects:
            for eg in g.effects:
                v = ef + eg
                best = max(best, v[2] + math.hypot(v[0], v[1]))
        return best
    best = 0.0
    for w in t.pure_states:
        mf = max(t.pair(e, w) for e in f.effects)
        mg = max(t.pair(e, w) for e in g.effects)
        best = max(best, mf + mg)
    return best


def sample_feasible_joints(
    f: Observable, g: Observable, count: int, seed: int = 0,
    match_marginals: bool = False,
) -> list:
    """Random joint observables on the product outcome set of ``f`` and
    ``g``: LP vertices found by maximizing seeded random objectives over
    the joint polytope, plus random convex mixtures of those vertices for
    interior coverage.

    By default only the unit-sum constraint is imposed (any joint is an
    admissible approximator of the pair); with ``match_marginals`` the
    marginals are pinned to ``f`` and ``g``, which requires the pair to be
    compatible.  On the disc the effect cone is shrunk by cos(pi/64) so
    every sampled cell is exactly valid.
    """
    theory = f.theory
    na, nb = len(f.effects), len(g.effects)
    dim = theory.dim
    nvars = na * nb * dim
    if match_marginals:
        a_eq, b_eq = _joint_equalities(theory, f, g)
    else:
        a_eq = np.zeros((dim, nvars))
        for c in range(na * nb):
            a_eq[:, c * dim : (c + 1) * dim] = np.eye(dim)
        b_eq = np.array(theory.unit_effect, float)
    if theory.kind == "Disc":
        a_ub, b_ub = _disc_cut_rows(na * nb, 64, shrink=True)
    else:
        a_ub, b_ub = _finite_nonneg_rows(theory, na * nb, dim)
    rng = np.random.default_rng(seed)
    vertices = []
    n_vertex = max(2, (count + 1) // 2)
    attempts = 0
    while len(vertices) < n_vertex:
        if attempts > 4 * n_vertex + 20:
            raise RuntimeError("vertex sampling kept hitting degraded solves")
        attempts += 1
        c = rng.normal(size=nvars)
        p = LinearProgram(nvars, objective=c, a_eq=a_eq, b_eq=b_eq,
                          a_ub=a_ub, b_ub=b_ub)
        r = solve_lp(p)
        if r.status != "optimal":
            raise ValueError("pair admits no joint observable under these cuts")
        # long degenerate pivot sequences can silently degrade the tableau;
        # reject any vertex whose constraint residuals show it
        if np.max(np.abs(a_eq @ r.x - b_eq)) > 1e-8:
            continue
        if a_ub is not None and np.max(a_ub @ r.x - b_ub) > 1e-8:
            continue
        vertices.append(r.x)
    out = [
        _grid_from_solution(theory, x, na, nb)
        for x in vertices[: count]
    ]
    while len(out) < count:
        i, j = rng.integers(0, len(vertices), size=2)
        lam = rng.uniform()
        x = lam * vertices[i] + (1.0 - lam) * vertices[j]
        out.append(_grid_from_solution(theory, x, na, nb))
    return out[:count]


def witness_bound_check(fs: list, s0: StateSubset) -> dict:
    """dim aff(S0) + 1 <= sum of outcome counts - n + 1 whenever the tuple
    is S0-incompatible.  Returns the numbers and the verdict."""
    n = len(fs)
    bound = sum(len(f.effects) for f in fs) - n + 1
    lhs = s0.affine_dim + 1
    return {"bound": bound, "dim_aff_plus_1": lhs, "holds": lhs <= bound}
