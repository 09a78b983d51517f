"""Jost solutions and the entire functions built from their boundary data.

The solutions of -y'' + q(x) y = k^2 y normalized to pure exponentials
outside [0, 1] are integrated as ODEs in a variation-of-parameters form
(psi+ = alpha e^{ikx} + beta e^{-ikx}).  In those variables the two entire
functions of interest are single components:

    omega(k) = 2ik alpha(0, k)        (Wronskian of psi- and psi+)
    s(k)     = 2ik beta(0, k)         (companion function, reflection data)

so both are obtained without the catastrophic cancellation that affects the
naive boundary formulas deep in the complex plane.  Near k = 0 the
parametrization degenerates and the unscaled system is integrated instead.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import ConsistencyError, DomainError, NonconvergenceError
from .potential import Potential, l1_tail

DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-120
_K_RAW = 0.5  # below this |k| the unscaled formulation is used
_IM_LOG_SWITCH = 170.0  # beyond this |Im k| omega_log renormalizes chunkwise
_CHUNK = 96


@dataclass(frozen=True)
class JostEvaluation:
    """(psi, dpsi/dx) of a Jost solution at position x and frequency k."""

    x: float
    k: complex
    psi: complex
    dpsi: complex


@dataclass(frozen=True)
class ScatteringData:
    """omega, s and the transmission/reflection coefficients at one real k."""

    k: complex
    omega: complex
    s: complex
    T: complex
    Rplus: complex
    Rminus: complex


def wronskian(f: JostEvaluation, g: JostEvaluation) -> complex:
    """{f, g} := f g' - f' g, both factors taken at the same (x, k)."""
    if f.x != g.x or f.k != g.k:
        raise DomainError("wronskian requires evaluations at the same x and k")
    return f.psi * g.dpsi - f.dpsi * g.psi


def _piece_eval(coeff) -> "callable":
    rev = [float(c) for c in coeff[::-1]]

    def f(t: float) -> float:
        r = 0.0
        for c in rev:
            r = r * t + c
        return r

    return f


def _run_chain(q: Potential, ks, xs, *, backward, make_rhs, y0, rtol, atol):
    """Integrate a batched system piecewise across the breakpoints of q.

    make_rhs(piece_fun, left_edge) builds the RHS for one smooth piece;
    returns (eval_states, final_state) where eval_states[i] is the state
    column (ncomp, nk) at xs[i].
    """
    edges, coeffs = q.as_pieces()
    edges = np.asarray(edges, dtype=float)
    nk = len(ks)
    ncomp = len(y0) // nk
    kmax = float(np.max(np.abs(ks))) if nk else 0.0

    piece_order = range(len(coeffs) - 1, -1, -1) if backward else range(len(coeffs))
    edge_states = {len(edges) - 1 if backward else 0: np.asarray(y0, dtype=complex)}
    interior: dict[int, list[tuple[int, float]]] = {}
    edge_requests: dict[int, list[int]] = {}
    for i, x in enumerate(xs):
        hit = np.nonzero(np.abs(edges - x) <= 1e-15)[0]
        if hit.size:
            edge_requests.setdefault(int(hit[0]), []).append(i)
        else:
            p = int(np.searchsorted(edges, x, side="right") - 1)
            interior.setdefault(p, []).append((i, x))

    eval_states: dict[int, np.ndarray] = {}
    y = np.asarray(y0, dtype=complex)
    for p in piece_order:
        a, b = (edges[p + 1], edges[p]) if backward else (edges[p], edges[p + 1])
        rhs = make_rhs(_piece_eval(coeffs[p]), float(edges[p]))
        pts = sorted((x for _, x in interior.get(p, [])), reverse=backward)
        t_eval = list(pts) + [b]
        first = min(abs(b - a), 0.2 / (1.0 + kmax)) or None
        sol = solve_ivp(
            rhs,
            (a, b),
            y,
            method="DOP853",
            rtol=rtol,
            atol=atol,
            t_eval=t_eval,
            first_step=first,
        )
        if not sol.success:
            x_fail = float(sol.t[-1]) if len(sol.t) else float(a)
            raise NonconvergenceError(
                f"ODE integration stalled near x={x_fail}", x=x_fail, k=complex(ks[0])
            )
        cols = {t: sol.y[:, j] for j, t in enumerate(sol.t)}
        for i, x in interior.get(p, []):
            eval_states[i] = cols[x].reshape(ncomp, nk)
        y = sol.y[:, -1]
        edge_states[p if backward else p + 1] = y

    for edge_idx, req in edge_requests.items():
        if edge_idx not in edge_states:
            # an edge never crossed (requests outside integration span)
            raise DomainError("evaluation point outside the integrated range")
        for i in req:
            eval_states[i] = edge_states[edge_idx].reshape(ncomp, nk)
    return eval_states, y.reshape(ncomp, nk)


def _plus_vop(q, ks, xs, derivs, rtol, atol):
    ks = np.asarray(ks, dtype=complex)
    nk = len(ks)

    def make_rhs(qf, left):
        if derivs:

            def rhs(x, y):
                a, b, A, B = y.reshape(4, nk)
                g = qf(x - left) / (2j * ks)
                E = np.exp(-2j * ks * x)
                aE = a / E
                bE = b * E
                da = g * (a + bE)
                db = -g * (aE + b)
                dA = (-g / ks) * (a + bE) + g * (A + B * E - 2j * x * bE)
                dB = (g / ks) * (aE + b) - g * (A / E + 2j * x * aE + B)
                return np.concatenate([da, db, dA, dB])

            return rhs

        def rhs(x, y):
            a, b = y.reshape(2, nk)
            g = qf(x - left) / (2j * ks)
            da = g * (a + b * np.exp(-2j * ks * x))
            db = -g * (a * np.exp(2j * ks * x) + b)
            return np.concatenate([da, db])

        return rhs

    ncomp = 4 if derivs else 2
    y0 = np.zeros(ncomp * nk, dtype=complex)
    y0[:nk] = 1.0
    states, final = _run_chain(q, ks, xs, backward=True, make_rhs=make_rhs, y0=y0, rtol=rtol, atol=atol)

    a0, b0 = final[0], final[1]
    omega = 2j * ks * a0
    s = 2j * ks * b0
    domega = ds = None
    if derivs:
        domega = 2j * a0 + 2j * ks * final[2]
        ds = 2j * b0 + 2j * ks * final[3]
    psi = np.empty((len(xs), nk), dtype=complex)
    dpsi = np.empty_like(psi)
    for i, x in enumerate(xs):
        a, b = states[i][0], states[i][1]
        ep, em = np.exp(1j * ks * x), np.exp(-1j * ks * x)
        psi[i] = a * ep + b * em
        dpsi[i] = 1j * ks * (a * ep - b * em)
    return psi, dpsi, omega, s, domega, ds


def _plus_raw(q, ks, xs, derivs, rtol, atol):
    ks = np.asarray(ks, dtype=complex)
    nk = len(ks)

    def make_rhs(qf, left):
        if derivs:

            def rhs(x, y):
                p, dp, pk, dpk = y.reshape(4, nk)
                qq = qf(x - left)
                return np.concatenate([dp, (qq - ks * ks) * p, dpk, (qq - ks * ks) * pk - 2 * ks * p])

            return rhs

        def rhs(x, y):
            p, dp = y.reshape(2, nk)
            return np.concatenate([dp, (qf(x - left) - ks * ks) * p])

        return rhs

    eik = np.exp(1j * ks)
    if derivs:
        y0 = np.concatenate([eik, 1j * ks * eik, 1j * eik, 1j * (1 + 1j * ks) * eik])
    else:
        y0 = np.concatenate([eik, 1j * ks * eik])
    states, final = _run_chain(q, ks, xs, backward=True, make_rhs=make_rhs, y0=y0, rtol=rtol, atol=atol)

    p0, dp0 = final[0], final[1]
    omega = dp0 + 1j * ks * p0
    s = -dp0 + 1j * ks * p0
    domega = ds = None
    if derivs:
        pk0, dpk0 = final[2], final[3]
        domega = dpk0 + 1j * p0 + 1j * ks * pk0
        ds = -dpk0 + 1j * p0 + 1j * ks * pk0
    psi = np.empty((len(xs), nk), dtype=complex)
    dpsi = np.empty_like(psi)
    for i in range(len(xs)):
        psi[i] = states[i][0]
        dpsi[i] = states[i][1]
    return psi, dpsi, omega, s, domega, ds


def _minus_vop(q, ks, xs, rtol, atol):
    ks = np.asarray(ks, dtype=complex)
    nk = len(ks)

    def make_rhs(qf, left):
        def rhs(x, y):
            c, d = y.reshape(2, nk)
            g = qf(x - left) / (2j * ks)
            dc = -g * (c + d * np.exp(2j * ks * x))
            dd = g * (c * np.exp(-2j * ks * x) + d)
            return np.concatenate([dc, dd])

        return rhs

    y0 = np.zeros(2 * nk, dtype=complex)
    y0[:nk] = 1.0
    states, _ = _run_chain(q, ks, xs, backward=False, make_rhs=make_rhs, y0=y0, rtol=rtol, atol=atol)
    psi = np.empty((len(xs), nk), dtype=complex)
    dpsi = np.empty_like(psi)
    for i, x in enumerate(xs):
        c, d = states[i][0], states[i][1]
        em, ep = np.exp(-1j * ks * x), np.exp(1j * ks * x)
        psi[i] = c * em + d * ep
        dpsi[i] = 1j * ks * (-c * em + d * ep)
    return psi, dpsi


def _minus_raw(q, ks, xs, rtol, atol):
    ks = np.asarray(ks, dtype=complex)
    nk = len(ks)

    def make_rhs(qf, left):
        def rhs(x, y):
            p, dp = y.reshape(2, nk)
            return np.concatenate([dp, (qf(x - left) - ks * ks) * p])

        return rhs

    y0 = np.concatenate([np.ones(nk, dtype=complex), -1j * ks])
    states, _ = _run_chain(q, ks, xs, backward=False, make_rhs=make_rhs, y0=y0, rtol=rtol, atol=atol)
    psi = np.empty((len(xs), nk), dtype=complex)
    dpsi = np.empty_like(psi)
    for i in range(len(xs)):
        psi[i] = states[i][0]
        dpsi[i] = states[i][1]
    return psi, dpsi


def _plus_solution(q, ks, xs=(), derivs=False, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Batched psi+ data: (psi, dpsi) at xs plus (omega, s[, domega, ds])."""
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    xs = list(xs)
    nk = len(ks)
    psi = np.empty((len(xs), nk), dtype=complex)
    dpsi = np.empty_like(psi)
    omega = np.empty(nk, dtype=complex)
    s = np.empty(nk, dtype=complex)
    domega = np.empty(nk, dtype=complex) if derivs else None
    ds = np.empty(nk, dtype=complex) if derivs else None
    small = np.abs(ks) < _K_RAW
    for mask, solver in ((small, _plus_raw), (~small, _plus_vop)):
        idx = np.nonzero(mask)[0]
        if not idx.size:
            continue
        p, dp, om, ss, dom, dss = solver(q, ks[idx], xs, derivs, rtol, atol)
        psi[:, idx] = p
        dpsi[:, idx] = dp
        omega[idx] = om
        s[idx] = ss
        if derivs:
            domega[idx] = dom
            ds[idx] = dss
    return psi, dpsi, omega, s, domega, ds


def _minus_solution(q, ks, xs, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    xs = list(xs)
    nk = len(ks)
    psi = np.empty((len(xs), nk), dtype=complex)
    dpsi = np.empty_like(psi)
    small = np.abs(ks) < _K_RAW
    for mask, solver in ((small, _minus_raw), (~small, _minus_vop)):
        idx = np.nonzero(mask)[0]
        if not idx.size:
            continue
        p, dp = solver(q, ks[idx], xs, rtol, atol)
        psi[:, idx] = p
        dpsi[:, idx] = dp
    return psi, dpsi


def _split_xs(xs):
    """Partition evaluation points into left (< 0), core [0, 1], right (> 1)."""
    xs = [float(x) for x in xs]
    core = [x for x in xs if 0.0 <= x <= 1.0]
    return xs, core


def jost_plus(q: Potential, k: complex, xs, rtol: float = DEFAULT_RTOL) -> list[JostEvaluation]:
    """psi+ and its x-derivative at the requested positions.

    psi+ solves -y'' + q y = k^2 y with y = e^{ikx} for x >= 1; the ODE is
    integrated backward from x = 1 with step boundaries on every breakpoint
    of the potential.  Positions outside [0, 1] are filled in with the exact
    free propagation.
    """
    if not len(list(xs)):
        raise DomainError("jost_plus requires at least one evaluation point")
    k = complex(k)
    all_xs, core = _split_xs(xs)
    need_zero = any(x < 0.0 for x in all_xs)
    solve_pts = sorted(set(core) | ({0.0} if need_zero else set()))
    psi, dpsi, *_ = _plus_solution(q, [k], solve_pts, rtol=rtol)
    at = {x: (psi[i, 0], dpsi[i, 0]) for i, x in enumerate(solve_pts)}
    out = []
    for x in all_xs:
        if x > 1.0:
            out.append(JostEvaluation(x, k, cmath.exp(1j * k * x), 1j * k * cmath.exp(1j * k * x)))
        elif x < 0.0:
            p0, dp0 = at[0.0]
            out.append(JostEvaluation(x, k, *_free_propagate(p0, dp0, k, x)))
        else:
            p, dp = at[x]
            out.append(JostEvaluation(x, k, complex(p), complex(dp)))
    return out


def jost_minus(q: Potential, k: complex, xs, rtol: float = DEFAULT_RTOL) -> list[JostEvaluation]:
    """psi- and its x-derivative; forward analogue of jost_plus from x = 0."""
    if not len(list(xs)):
        raise DomainError("jost_minus requires at least one evaluation point")
    k = complex(k)
    all_xs, core = _split_xs(xs)
    need_one = any(x > 1.0 for x in all_xs)
    solve_pts = sorted(set(core) | ({1.0} if need_one else set()))
    psi, dpsi = _minus_solution(q, [k], solve_pts, rtol=rtol)
    at = {x: (psi[i, 0], dpsi[i, 0]) for i, x in enumerate(solve_pts)}
    out = []
    for x in all_xs:
        if x < 0.0:
            out.append(JostEvaluation(x, k, cmath.exp(-1j * k * x), -1j * k * cmath.exp(-1j * k * x)))
        elif x > 1.0:
            p1, dp1 = at[1.0]
            out.append(JostEvaluation(x, k, *_free_propagate(p1, dp1, k, x, x0=1.0)))
        else:
            p, dp = at[x]
            out.append(JostEvaluation(x, k, complex(p), complex(dp)))
    return out


def _free_propagate(p, dp, k, x, x0=0.0):
    """Solve y'' = -k^2 y from (p, dp) at x0 to x (q = 0 there)."""
    h = x - x0
    if k == 0:
        return p + dp * h, dp
    return (
        p * cmath.cos(k * h) + dp * cmath.sin(k * h) / k,
        -p * k * cmath.sin(k * h) + dp * cmath.cos(k * h),
    )


def omega_s_many(q: Potential, ks, derivs: bool = False, rtol: float = DEFAULT_RTOL):
    """omega and s (optионally with d/dk) on an array of frequencies.

    Work is chunked in groups of similar |Im k| so the shared adaptive step
    of a batch is not driven by an unrelated frequency.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=complex))
    om = np.empty(ks.shape, dtype=complex)
    s = np.empty(ks.shape, dtype=complex)
    dom = np.empty(ks.shape, dtype=complex) if derivs else None
    dss = np.empty(ks.shape, dtype=complex) if derivs else None
    order = np.lexsort((np.abs(ks), np.round(np.abs(ks.imag), 1)))
    for i in range(0, len(order), _CHUNK):
        idx = order[i : i + _CHUNK]
        _, _, o, ss, do, dssx = _plus_solution(q, ks[idx], [], derivs=derivs, rtol=rtol)
        om[idx] = o
        s[idx] = ss
        if derivs:
            dom[idx] = do
            dss[idx] = dssx
    if derivs:
        return om, s, dom, dss
    return om, s


def omega_many(q, ks, rtol=DEFAULT_RTOL):
    return omega_s_many(q, ks, rtol=rtol)[0]


def s_many(q, ks, rtol=DEFAULT_RTOL):
    return omega_s_many(q, ks, rtol=rtol)[1]


def omega(q: Potential, k: complex, rtol: float = DEFAULT_RTOL) -> complex:
    """The Wronskian of psi- and psi+, entire in k; equals 2ik/T(k)."""
    return complex(omega_many(q, [k], rtol=rtol)[0])


def s_func(q: Potential, k: complex, rtol: float = DEFAULT_RTOL) -> complex:
    """The companion entire function -{psi-(x,-k), psi+(x,k)}."""
    return complex(s_many(q, [k], rtol=rtol)[0])


def omega_prime(q: Potential, k: complex, rtol: float = DEFAULT_RTOL) -> complex:
    """d omega / dk, from the variational system integrated alongside psi+."""
    return complex(omega_s_many(q, [k], derivs=True, rtol=rtol)[2][0])


def s_prime(q: Potential, k: complex, rtol: float = DEFAULT_RTOL) -> complex:
    return complex(omega_s_many(q, [k], derivs=True, rtol=rtol)[3][0])


def omega_evaluator(q: Potential, rtol: float = DEFAULT_RTOL):
    """Vectorized (omega, omega') pair evaluator for the zero finder."""

    def fdf(ks):
        om, _, dom, _ = omega_s_many(q, ks, derivs=True, rtol=rtol)
        return om, dom

    return fdf


def s_evaluator(q: Potential, rtol: float = DEFAULT_RTOL):
    """Vectorized (s, s') pair evaluator for the zero finder."""

    def fdf(ks):
        _, ss, _, dss = omega_s_many(q, ks, derivs=True, rtol=rtol)
        return ss, dss

    return fdf


def omega_values(q: Potential, rtol: float = DEFAULT_RTOL):
    def f(ks):
        return omega_many(q, ks, rtol=rtol)

    return f


def s_values(q: Potential, rtol: float = DEFAULT_RTOL):
    def f(ks):
        return s_many(q, ks, rtol=rtol)

    return f


def omega_log(q: Potential, k: complex, rtol: float = DEFAULT_RTOL) -> complex:
    """log omega(k) = log|omega| + i arg omega, stable against overflow.

    For |Im k| beyond the raw floating-point range the integration is
    renormalized chunk by chunk and the scale factors accumulated in the
    logarithm.
    """
    k = complex(k)
    if abs(k.imag) <= _IM_LOG_SWITCH:
        val = omega(q, k, rtol=rtol)
        if val == 0:
            raise DomainError("omega_log undefined at a zero of omega")
        return cmath.log(val)
    return _omega_log_renormalized(q, k, rtol)


def _omega_log_renormalized(q, k, rtol):
    edges, coeffs = q.as_pieces()
    sub = 40.0 / max(1.0, abs(k.imag))
    y = np.array([1.0, 1j * k], dtype=complex)  # psi+ scaled by e^{-ik}
    lam = 1j * k
    for p in range(len(coeffs) - 1, -1, -1):
        left, right = edges[p], edges[p + 1]
        qf = _piece_eval(coeffs[p])
        nsub = max(1, int(math.ceil((right - left) / sub)))
        cuts = np.linspace(right, left, nsub + 1)
        for a, b in zip(cuts[:-1], cuts[1:]):

            def rhs(x, yv):
                return np.array([yv[1], (qf(x - left) - k * k) * yv[0]])

            sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=rtol, atol=0.0,
                            first_step=min(abs(a - b), 0.2 / (1.0 + abs(k))))
            if not sol.success:
                raise NonconvergenceError("renormalized integration stalled", x=float(a), k=k)
            y = sol.y[:, -1]
            norm = max(abs(y[0]), abs(y[1]))
            y = y / norm
            lam += math.log(norm)
    val = y[1] + 1j * k * y[0]
    return cmath.log(val) + lam


def scattering_coefficients(q: Potential, k: float, rtol: float = DEFAULT_RTOL) -> ScatteringData:
    """T and R+- at a real frequency k != 0, via 2ik/T = omega, R+- = s(+-k)/omega."""
    kc = complex(k)
    if kc.imag != 0.0 or kc.real == 0.0:
        raise DomainError("transmission and reflection are defined for real k != 0")
    om, s_pm = omega_s_many(q, [kc, -kc], rtol=rtol)
    om_k = complex(om[0])
    if abs(om_k) < 1e-13:
        raise ConsistencyError("omega vanished on the real axis away from 0")
    T = 2j * kc / om_k
    return ScatteringData(
        k=kc,
        omega=om_k,
        s=complex(s_pm[0]),
        T=T,
        Rplus=complex(s_pm[0]) / om_k,
        Rminus=complex(s_pm[1]) / om_k,
    )


def neumann_psi_plus(q: Potential, k: complex, x: float, J: int):
    """Partial sum of the iterated integral-equation series for psi+.

    Returns (partial_sum, tail_bound) where the partial sum collects the
    first J iterates psi_0 .. psi_{J-1} and tail_bound dominates the dropped
    remainder:  e^{|Im k|(2-x)} (Q(x)/|k|)^J / J! * e^{Q(x)/|k|}  with
    Q(x) the L1 mass of q on [x, 1].  Entirely independent of the ODE path.
    """
    k = complex(k)
    if abs(k) < 0.1:
        raise DomainError("the series bound is useless for |k| < 0.1")
    if J < 1:
        raise DomainError("at least one series term is required")
    if not 0.0 <= x <= 1.0:
        raise DomainError("evaluation point must lie in [0, 1]")

    edges, coeffs = q.as_pieces()
    meshes = []
    for p in range(len(coeffs)):
        lo, hi = edges[p], edges[p + 1]
        n = max(8, int(math.ceil((hi - lo) * max(256.0, 24.0 * abs(k) ** 1.5))))
        meshes.append(np.linspace(lo, hi, n + 1))
    if not any(abs(x - m).min() < 1e-15 for m in meshes):
        p = min(int(np.searchsorted(edges, x, side="right")) - 1, len(coeffs) - 1)
        meshes[p] = np.sort(np.append(meshes[p], x))

    # per-piece values so edge samples take the piece's own limit (q may jump)
    qvals = []
    for p, m in enumerate(meshes):
        f = _piece_eval(coeffs[p])
        qvals.append(np.array([f(t - edges[p]) for t in m]))
    psi_prev = [np.exp(1j * k * m) for m in meshes]
    target = None
    for p, m in enumerate(meshes):
        hit = np.nonzero(np.abs(m - x) < 1e-15)[0]
        if hit.size:
            target = (p, int(hit[0]))
    out = psi_prev[target[0]][target[1]]

    for _ in range(1, J):
        # cumulative right integrals of e^{+-ikt} q psi_prev, piece by piece
        up_tails = []
        dn_tails = []
        up_full = []
        dn_full = []
        for p, m in enumerate(meshes):
            fu = CubicSpline(m, np.exp(1j * k * m) * qvals[p] * psi_prev[p]).antiderivative()
            fd = CubicSpline(m, np.exp(-1j * k * m) * qvals[p] * psi_prev[p]).antiderivative()
            up_tails.append(fu(m[-1]) - fu(m))
            dn_tails.append(fd(m[-1]) - fd(m))
            up_full.append(fu(m[-1]) - fu(m[0]))
            dn_full.append(fd(m[-1]) - fd(m[0]))
        up_suffix = np.concatenate([[0.0], np.cumsum(up_full[::-1])])[::-1]
        dn_suffix = np.concatenate([[0.0], np.cumsum(dn_full[::-1])])[::-1]
        psi_next = []
        for p, m in enumerate(meshes):
            A = up_tails[p] + up_suffix[p + 1]
            Bv = dn_tails[p] + dn_suffix[p + 1]
            psi_next.append((np.exp(-1j * k * m) * A - np.exp(1j * k * m) * Bv) / (2j * k))
        psi_prev = psi_next
        out = out + psi_prev[target[0]][target[1]]

    Q = l1_tail(q, x)
    ratio = Q / abs(k)
    try:
        tail = math.exp(abs(k.imag) * (2.0 - x)) * ratio**J / math.factorial(J) * math.exp(ratio)
    except OverflowError:
        tail = math.inf
    return complex(out), float(tail)
