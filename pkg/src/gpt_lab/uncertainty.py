"""Preparation and measurement uncertainty measures: overall width,
localization error, error bar width, Werner and l-infinity distances,
entropic noise, Landau-Pollak bounds and the majorization vector, plus the
witness states tying preparation bounds to measurement bounds."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .gpt_core import StateVec, Theory, eigenstate_of
from .numerics import LinearProgram, shannon_entropy, solve_lp
from .observables import JointObservable, Observable, marginals, measure

EPS = 1e-12


# -- widths and errors on statistics ------------------------------------


def _width_candidates(metric: np.ndarray) -> np.ndarray:
    vals = {0.0}
    k = metric.shape[0]
    for a in range(k):
        for b in range(k):
            if a != b:
                vals.add(2.0 * metric[a, b])
    return np.array(sorted(vals))


def overall_width(p, metric: np.ndarray, epsilon: float) -> float:
    """Smallest ball width capturing mass 1 - epsilon, minimized over the
    ball center.  The ball O(a; w) contains the outcomes within w/2 of a."""
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError("epsilon must lie in [0, 1]")
    p = np.asarray(p, float)
    k = len(p)
    best = math.inf
    for w in _width_candidates(metric):
        for a in range(k):
            mass = p[metric[a] <= w / 2 + EPS].sum()
            if mass >= 1.0 - epsilon - 1e-12:
                return float(w)
    return best  # unreachable: the full-support ball always has mass 1


def localization_error(p) -> float:
    """1 - max_a p(a)."""
    return float(1.0 - np.max(np.asarray(p, float)))


def _effect_eigenstates(t: Theory, e: np.ndarray) -> list:
    """Extreme points of the face {omega : e(omega) = 1}."""
    e = np.asarray(e, float)
    if t.kind == "Disc":
        nxy = math.hypot(e[0], e[1])
        if nxy > EPS and e[2] + nxy >= 1.0 - 1e-9:
            return [np.array([e[0] / nxy, e[1] / nxy, 1.0])]
        return []
    return [w for w in t.pure_states if t.pair(e, w) >= 1.0 - 1e-9]


def error_bar_width(
    approx: Observable, ideal: Observable, epsilon: float, metric=None
) -> float:
    """Smallest w such that, on every eigenstate of every ideal effect, the
    approximating observable puts mass at least 1 - epsilon within w/2 of
    the corresponding outcome."""
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError("epsilon must lie in [0, 1]")
    if len(approx.effects) != len(ideal.effects):
        raise ValueError("observables must share the outcome set")
    d = np.asarray(metric, float) if metric is not None else ideal.get_metric()
    t = ideal.theory
    eigs = []
    for a, e in enumerate(ideal.effects):
        states = _effect_eigenstates(t, e)
        if not states:
            raise ValueError(f"outcome {a}: no eigenstate; ideal input required")
        eigs.append(states)
    for w in _width_candidates(d):
        ok = True
        for a, states in enumerate(eigs):
            inside = d[a] <= w / 2 + EPS
            for omega in states:
                mass = sum(
                    t.pair(approx.effects[b], omega)
                    for b in range(len(approx.effects))
                    if inside[b]
                )
                if mass < 1.0 - epsilon - 1e-12:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return float(w)
    raise RuntimeError("no admissible width; metric inconsistent")


# -- distances between observables --------------------------------------


def _stat_gap(approx: Observable, ideal: Observable, omega) -> np.ndarray:
    t = ideal.theory
    return np.array(
        [
            t.pair(fa, omega) - t.pair(f, omega)
            for fa, f in zip(approx.effects, ideal.effects)
        ]
    )


def _lipschitz_lp(delta: np.ndarray, metric: np.ndarray) -> float:
    """max |sum_a h(a) delta_a| over the Lipschitz ball, gauge h(0) = 0."""
    k = len(delta)
    rows, rhs = [], []
    for a in range(k):
        for b in range(a + 1, k):
            row = np.zeros(k)
            row[a], row[b] = 1.0, -1.0
            rows.append(row.copy())
            rhs.append(metric[a, b])
            rows.append(-row)
            rhs.append(metric[a, b])
    gauge = np.zeros((1, k))
    gauge[0, 0] = 1.0
    best = 0.0
    for sign in (1.0, -1.0):
        p = LinearProgram(
            k,
            objective=-sign * delta,
            a_eq=gauge,
            b_eq=np.zeros(1),
            a_ub=np.array(rows),
            b_ub=np.array(rhs),
        )
        r = solve_lp(p)
        if r.status != "optimal":
            raise RuntimeError(f"Lipschitz LP failed: {r.status}")
        best = max(best, -r.value)
    return best


def werner_measure(approx: Observable, ideal: Observable, metric=None) -> float:
    """Largest expectation gap over slowly varying outcome functions,
    maximized over states."""
    d = np.asarray(metric, float) if metric is not None else ideal.get_metric()
    t = ideal.theory
    k = len(ideal.effects)
    if k == 2:
        # two-point Lipschitz ball reduces to h in {(0, 0), (0, +-d01)}
        return d[0, 1] * linf_distance(approx, ideal)
    if t.kind == "Disc":
        best = 0.0
        for j in range(t.resolution):
            th = 2 * math.pi * j / t.resolution
            delta = _stat_gap(approx, ideal, t.disc_state(th))
            best = max(best, _lipschitz_lp(delta, d))
        return best
    return max(
        _lipschitz_lp(_stat_gap(approx, ideal, w), d) for w in t.pure_states
    )


def linf_distance(approx: Observable, ideal: Observable) -> float:
    """Worst-case per-outcome probability gap, maximized over states."""
    t = ideal.theory
    if t.kind == "Disc":
        best = 0.0
        for fa, f in zip(approx.effects, ideal.effects):
            c = np.asarray(fa, float) - np.asarray(f, float)
            best = max(best, abs(c[2]) + math.hypot(c[0], c[1]))
        return best
    best = 0.0
    for w in t.pure_states:
        best = max(best, float(np.max(np.abs(_stat_gap(approx, ideal, w)))))
    return best


# -- entropic measures --------------------------------------------------


def _require_self_dual(t: Theory) -> None:
    if t.kind == "Polygon" and t.n % 2 == 0 and t.representation != "rescaled":
        raise ValueError(
            "entropic measures need the self-dual (rescaled) representation"
        )


def entropic_noise(approx: Observable, ideal: Observable) -> float:
    """Conditional entropy H(ideal | approx) of the joint outcome
    distribution p(x, xhat) = <e_x, m_xhat> (self-dual representation)."""
    t = ideal.theory
    _require_self_dual(t)
    joint = np.array(
        [
            [t.pair(e, m) for m in approx.effects]
            for e in ideal.effects
        ]
    )
    joint = np.clip(joint, 0.0, None)
    total = joint.sum()
    if total <= EPS:
        raise ValueError("degenerate joint distribution")
    joint /= total
    h = 0.0
    for xhat in range(joint.shape[1]):
        q = joint[:, xhat].sum()
        if q > EPS:
            h += q * shannon_entropy(joint[:, xhat] / q)
    return h


def entropic_pur_bound(gamma: float) -> float:
    """-2 log(gamma / 2)."""
    if not (0.0 < gamma <= 2.0):
        raise ValueError("gamma must lie in (0, 2]")
    return -2.0 * math.log(gamma / 2.0)


# -- Landau-Pollak bounds -----------------------------------------------


def max_statistics_sum(f: Observable, g: Observable) -> float:
    """Numeric gamma: max over pure states of max_a f_a + max_b g_b."""
    t = f.theory
    if t.kind == "Disc":
        if len(f.effects) != 2 or len(g.effects) != 2:
            raise ValueError("disc bound implemented for binary pairs")
        best = 0.0
        for ef in f.effects:
            for eg in g.effects:
                v = np.asarray(ef, float) + np.asarray(eg, float)
                best = max(best, v[2] + math.hypot(v[0], v[1]))
        return best
    best = 0.0
    for w in t.pure_states:
        mf = max(t.pair(e, w) for e in f.effects)
        mg = max(t.pair(e, w) for e in g.effects)
        best = max(best, mf + mg)
    return best


def gamma_closed_form(n: int | None, theta: float) -> float:
    """Table closed form for the polygon pair (F_i, G_0) at separation
    theta = 2 pi i / n; n = None gives the disc limit."""
    if not (0.0 < theta < math.pi):
        raise ValueError("separation angle must lie in (0, pi)")
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    if n is None:
        return max(1.0 + c, 1.0 + s)
    r2 = 1.0 / math.cos(math.pi / n)
    i = theta * n / (2.0 * math.pi)
    i_int = round(i)
    if abs(i - i_int) > 1e-9 or not (0 < i_int < n / 2):
        raise ValueError("index out of range for this polygon")
    if n % 2 == 0:
        if n % 4 == 0:
            if i_int % 2 == 0:
                return max(1.0 + c, 1.0 + s)
            return max(1.0 + r2 * c, 1.0 + r2 * s)
        if i_int % 2 == 0:
            return max(1.0 + c, 1.0 + r2 * s)
        return max(1.0 + r2 * c, 1.0 + s)
    front = 2.0 * r2 / (1.0 + r2)
    tail = 1.0 + s / math.cos(math.pi / (2 * n))
    if i_int % 2 == 0:
        return max(front + (2.0 / (1.0 + r2)) * c, tail)
    return max(front * (1.0 + c), tail)


def landau_pollak_gamma(theory: Theory, i) -> float:
    """Landau-Pollak bound gamma for the pair (F_i, G_0) in a polygon
    theory, or for the disc pair at separation angle ``i``.

    Computes both the numeric pure-state maximum and the table closed
    form and asserts they agree to 1e-9.
    """
    if theory.kind == "Disc":
        theta = float(i)
        u = theory.unit_effect
        e1 = theory.disc_extreme_effect(theta)
        e0 = theory.disc_extreme_effect(0.0)
        f = Observable(theory, [e1, u - e1])
        g = Observable(theory, [e0, u - e0])
        numeric = max_statistics_sum(f, g)
        closed = gamma_closed_form(None, theta)
    elif theory.kind == "Polygon":
        n = theory.n
        i = int(i)
        if not (0 < i < n / 2):
            raise ValueError("index must satisfy 0 < i < n/2")
        ext = theory.extreme_effects()
        u = theory.unit_effect
        f = Observable(theory, [ext[i], u - ext[i]])
        g = Observable(theory, [ext[0], u - ext[0]])
        numeric = max_statistics_sum(f, g)
        closed = gamma_closed_form(n, 2.0 * math.pi * i / n)
    else:
        raise ValueError("Landau-Pollak closed forms exist for polygons and disc")
    if abs(numeric - closed) > 1e-9:
        raise AssertionError(
            f"closed form {closed!r} disagrees with numeric {numeric!r}"
        )
    return closed


# -- majorization -------------------------------------------------------


def _products_at(f: Observable, g: Observable, omega) -> np.ndarray:
    t = f.theory
    pf = np.array([t.pair(e, omega) for e in f.effects])
    pg = np.array([t.pair(e, omega) for e in g.effects])
    return np.outer(pf, pg).ravel()


def _topk_sum_max(f: Observable, g: Observable, k: int, sampler=None) -> float:
    """max over states of the sum of the k largest outcome products."""
    t = f.theory

    def score(omega):
        prods = np.sort(_products_at(f, g, omega))[::-1]
        return float(prods[:k].sum())

    best = 0.0
    if t.kind == "Disc":
        m = max(t.resolution, 256)
        thetas = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
        vals = [score(t.disc_state(th)) for th in thetas]
        j = int(np.argmax(vals))
        lo = thetas[j] - 2 * math.pi / m
        hi = thetas[j] + 2 * math.pi / m
        best = vals[j]
        for _ in range(8):  # iterative zoom to ~1e-12 angular resolution
            grid = np.linspace(lo, hi, 33)
            gvals = [score(t.disc_state(th)) for th in grid]
            jz = int(np.argmax(gvals))
            best = max(best, gvals[jz])
            span = grid[1] - grid[0]
            lo, hi = grid[jz] - span, grid[jz] + span
        return best
    verts = t.pure_states
    for w in verts:
        best = max(best, score(w))
    # boundary edges: the score is piecewise quadratic along an edge
    for a, b in itertools.combinations(range(len(verts)), 2):
        for s in np.linspace(0.0, 1.0, 64):
            best = max(best, score((1 - s) * verts[a] + s * verts[b]))
    if sampler is not None:
        for w in sampler:
            best = max(best, score(np.asarray(w, float)))
    return best


def majorization_vector(f: Observable, g: Observable, sampler=None) -> np.ndarray:
    """The vector r with partial sums R_k = max over states of the top-k
    outcome-product sum; binary pairs use the closed fast path
    r = (R1, 1 - R1, 0, 0) and verify R1 <= gamma^2 / 4."""
    na, nb = len(f.effects), len(g.effects)
    if na * nb > 16:
        raise ValueError("outcome grid too large; capped at 16 cells")
    if na == 2 and nb == 2:
        r1 = _topk_sum_max(f, g, 1, sampler)
        gamma = max_statistics_sum(f, g)
        if r1 > gamma * gamma / 4.0 + 1e-9:
            raise AssertionError("R1 exceeds gamma^2/4")
        return np.array([r1, 1.0 - r1, 0.0, 0.0])
    rs = [_topk_sum_max(f, g, k, sampler) for k in range(1, na * nb + 1)]
    rs = np.maximum.accumulate(np.clip(rs, 0.0, 1.0))
    rs[-1] = 1.0
    out = np.diff(np.concatenate([[0.0], rs]))
    return np.clip(out, 0.0, 1.0)


# -- witness states -----------------------------------------------------


def theorem_witness_state(
    joint: JointObservable,
    ideal_f: Observable,
    ideal_g: Observable,
    eps1: float,
    eps2: float,
    metric_a=None,
    metric_b=None,
):
    """Witness states realizing the preparation bounds inside measurement
    bounds, extracted from the cells of an approximate joint observable.

    Returns (StateVec, report).  The report carries, for the error-bar
    witness, W_{eps1}(approx_F, F) >= overall width of the witness's F
    statistics at eps1 + eps2 (and the G counterpart); for the l-infinity
    witness, the D_inf sum >= localization-error sum inequality.
    """
    if eps1 < 0 or eps2 < 0 or eps1 + eps2 > 1.0:
        raise ValueError("need eps1, eps2 >= 0 with eps1 + eps2 <= 1")
    t = joint.theory
    _require_self_dual(t)
    da = np.asarray(metric_a, float) if metric_a is not None else ideal_f.get_metric()
    db = np.asarray(metric_b, float) if metric_b is not None else ideal_g.get_metric()
    approx_f, approx_g = marginals(joint, atol=1e-6)
    w1 = error_bar_width(approx_f, ideal_f, eps1, da)
    w2 = error_bar_width(approx_g, ideal_g, eps2, db)

    na, nb = joint.shape()
    cells = []
    for a in range(na):
        for b in range(nb):
            m = joint.cell(a, b)
            if t.pair(t.unit_effect, m) > 1e-9:
                cells.append((a, b, eigenstate_of(t, m)))
    if not cells:
        raise ValueError("joint observable has no cell with positive mass")

    def ball_mass(ideal, omega, center, d, w):
        inside = d[center] <= w / 2 + EPS
        return sum(
            t.pair(ideal.effects[i], omega)
            for i in range(len(ideal.effects))
            if inside[i]
        )

    # error-bar witness: cell maximizing the captured ideal mass
    best_eb, sc_eb = None, -math.inf
    best_l, sc_l = None, -math.inf
    for a, b, omega in cells:
        s = ball_mass(ideal_f, omega, a, da, w1) + ball_mass(
            ideal_g, omega, b, db, w2
        )
        if s > sc_eb:
            best_eb, sc_eb = (a, b, omega), s
        s2 = t.pair(ideal_f.effects[a], omega) + t.pair(ideal_g.effects[b], omega)
        if s2 > sc_l:
            best_l, sc_l = (a, b, omega), s2
    _, _, omega_eb = best_eb
    _, _, omega_l = best_l

    eps = eps1 + eps2
    pf = measure(ideal_f, omega_eb)
    pg = measure(ideal_g, omega_eb)
    report = {
        "w1": w1,
        "w2": w2,
        "errorbar_overall_f": overall_width(pf, da, eps),
        "errorbar_overall_g": overall_width(pg, db, eps),
        "errorbar_slack_f": w1 - overall_width(pf, da, eps),
        "errorbar_slack_g": w2 - overall_width(pg, db, eps),
    }
    d1 = linf_distance(approx_f, ideal_f)
    d2 = linf_distance(approx_g, ideal_g)
    le = localization_error(measure(ideal_f, omega_l)) + localization_error(
        measure(ideal_g, omega_l)
    )
    report["dinf_sum"] = d1 + d2
    report["le_sum"] = le
    report["dinf_slack"] = d1 + d2 - le
    report["entropic_sum"] = entropic_noise(approx_f, ideal_f) + entropic_noise(
        approx_g, ideal_g
    )
    return StateVec(t, omega_eb), report
