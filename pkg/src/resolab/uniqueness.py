"""Numerical embodiment of the uniqueness statements: interior data, the
four equivalent forms of the mismatch functional, and subset densities.

The demos are falsification-style evidence, not proofs: the statements
assert injectivity of data maps, which is probed in the contrapositive
(different tails must produce different data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, Inapplicable, PoleError
from . import jost
from .potential import Potential, PotentialPair
from .spectrum import SpectralPoint, ZeroSet, coverage_radius, counting_function, find_omega_zeros, sign_set, find_s_zeros
from .util import gauss_legendre

FOUR_FORM_TOLERANCE = 1e-7

DEMO_HEADER = (
    "falsification-style numerical evidence: the uniqueness statement asserts "
    "an injective data map, checked in the contrapositive (different tails "
    "must yield different data); no proof is performed"
)


@dataclass(frozen=True)
class G1Evaluation:
    """The mismatch functional of a pair at one frequency, in up to four
    independently computed forms (tau form absent at poles of either
    logarithmic derivative)."""

    k: complex
    integral_form: complex
    omega_form: complex
    s_form: complex
    tau_form: complex | None

    def populated(self) -> list[complex]:
        forms = [self.integral_form, self.omega_form, self.s_form]
        if self.tau_form is not None:
            forms.append(self.tau_form)
        return forms


@dataclass(frozen=True)
class DensityEstimate:
    """Fitted density slope of a zero subset against a theorem threshold."""

    subset_label: str
    radii: list[float]
    counts: list[int]
    gamma_hat: float
    threshold: float
    meets_threshold: bool


def tau(q: Potential, k: complex, rtol: float = jost.DEFAULT_RTOL) -> complex:
    """Logarithmic derivative of psi+ at the midpoint x = 1/2."""
    ev = jost.jost_plus(q, k, [0.5], rtol=rtol)[0]
    if abs(ev.psi) < 1e-12 * abs(ev.dpsi):
        raise PoleError(f"midpoint logarithmic derivative undefined at k={k}")
    return ev.dpsi / ev.psi


def _integral_panels(pair: PotentialPair, k: complex):
    """Quadrature nodes/weights for the tail integral, split at breakpoints
    of both potentials and refined with the oscillation frequency."""
    a = pair.agreement_prefix
    edges = {a, 1.0}
    for s in (pair.q, pair.q_tilde):
        edges.update(b for b in s.breakpoints if a < b < 1.0)
    edges = sorted(edges)
    max_len = min(0.5, 10.0 / (1.0 + abs(k)))
    nodes, weights = gauss_legendre(24)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nsub = max(1, int(math.ceil((hi - lo) / max_len)))
        for cut in np.linspace(lo, hi, nsub + 1)[:-1]:
            width = (hi - lo) / nsub
            xs.append(cut + width * nodes)
            ws.append(width * weights)
    return np.concatenate(xs), np.concatenate(ws)


def g1(pair: PotentialPair, k: complex, rtol: float = jost.DEFAULT_RTOL) -> G1Evaluation:
    """All available forms of the mismatch functional at one frequency.

    integral: int_a^1 (q~ - q) psi+ psi~+ dx  (a = agreement prefix)
    omega:    omega psi~+(0) - omega~ psi+(0)
    s:        -s psi~+(0) + s~ psi+(0)
    tau:      psi+(1/2) psi~+(1/2) (tau - tau~), only for prefix 1/2
    """
    k = complex(k)
    xs, ws = _integral_panels(pair, k)
    want_tau = abs(pair.agreement_prefix - 0.5) < 1e-12
    eval_pts = list(xs) + [0.0] + ([0.5] if want_tau else [])

    def boundary_data(q):
        psi, dpsi, om, s, _, _ = jost._plus_solution(q, [k], eval_pts, rtol=rtol)
        return psi[:, 0], dpsi[:, 0], complex(om[0]), complex(s[0])

    psi_q, dpsi_q, om_q, s_q = boundary_data(pair.q)
    psi_t, dpsi_t, om_t, s_t = boundary_data(pair.q_tilde)

    dq = pair.q_tilde(xs) - pair.q(xs)
    integral = complex(np.sum(ws * dq * psi_q[: len(xs)] * psi_t[: len(xs)]))
    omega_form = om_q * psi_t[len(xs)] - om_t * psi_q[len(xs)]
    s_form = -s_q * psi_t[len(xs)] + s_t * psi_q[len(xs)]

    tau_form = None
    if want_tau:
        pq, dpq = psi_q[len(xs) + 1], dpsi_q[len(xs) + 1]
        pt, dpt = psi_t[len(xs) + 1], dpsi_t[len(xs) + 1]
        if abs(pq) >= 1e-12 * abs(dpq) and abs(pt) >= 1e-12 * abs(dpt):
            tau_form = pq * pt * (dpq / pq - dpt / pt)
    return G1Evaluation(
        k=k,
        integral_form=integral,
        omega_form=complex(omega_form),
        s_form=complex(s_form),
        tau_form=None if tau_form is None else complex(tau_form),
    )


def resonance_distance(zs_a: ZeroSet, zs_b: ZeroSet, radius: float) -> float:
    """Hausdorff distance between the multiplicity-flattened zero lists
    restricted to the disk |k| <= radius."""
    for zs in (zs_a, zs_b):
        if coverage_radius(zs.region) + 1e-12 < radius:
            raise DomainError("zero set does not cover the requested disk")
    a = [k for k in zs_a.flattened() if abs(k) <= radius]
    b = [k for k in zs_b.flattened() if abs(k) <= radius]
    if not a and not b:
        return 0.0
    if not a or not b:
        return math.inf

    def one_sided(xs, ys):
        return max(min(abs(x - y) for y in ys) for x in xs)

    return max(one_sided(a, b), one_sided(b, a))


def subset_density(
    zs: ZeroSet,
    selector: Callable[[SpectralPoint], bool],
    a: float,
    theorem: int,
    radii=None,
    label: str = "subset",
) -> DensityEstimate:
    """Density slope gamma of a selected zero subset vs the theorem threshold.

    N_subset(r) is fitted as (2 gamma / pi) r by least squares through the
    origin; the threshold is 2(1-a) for theorem 2 and 1-2a for theorem 3.
    """
    if not 0.0 <= a <= 1.0:
        raise DomainError("prefix a must lie in [0, 1]")
    if theorem not in (2, 3):
        raise DomainError("density thresholds exist for theorems 2 and 3 only")
    cov = coverage_radius(zs.region)
    if radii is None:
        radii = [cov * f for f in (0.4, 0.6, 0.8, 1.0)]
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise DomainError("need at least three radii for the density fit")
    selected = [p for p in zs.points if selector(p)]
    sub = ZeroSet(selected, zs.region, zs.residual_bound, zs.function_label, zs.potential_digest)
    counts = [n for _, n in counting_function(sub, radii)]
    r = np.array(radii)
    n = np.array(counts, dtype=float)
    gamma_hat = float((math.pi / 2.0) * (r @ n) / (r @ r))
    threshold = 2.0 * (1.0 - a) if theorem == 2 else 1.0 - 2.0 * a
    return DensityEstimate(
        subset_label=label,
        radii=radii,
        counts=counts,
        gamma_hat=gamma_hat,
        threshold=threshold,
        meets_threshold=bool(gamma_hat > threshold),
    )


_SELECTORS = {
    "all": lambda p: True,
    "every_second": None,  # index-based, built below
    "none": lambda p: False,
}


def make_selector(name: str, zs: ZeroSet):
    """Named zero-subset selectors; every_second thins by sorted index."""
    if name == "all":
        return lambda p: True
    if name == "none":
        return lambda p: False
    if name == "every_second":
        keep = {id(p) for i, p in enumerate(zs.points) if i % 2 == 0}
        return lambda p: id(p) in keep
    raise DomainError(f"unknown selector {name!r}")


@dataclass
class DemoConfig:
    theorem: int
    radius: float = 12.0
    separation_tolerance: float = 1e-3
    subset: str = "all"
    search_rtol: float = 1e-9
    search_tol: float = 1e-10


def _square_region(radius: float):
    pad = radius * 0.04 + 0.3
    return (-(radius + pad), radius + pad, -(radius + pad), radius + pad)


def _tail_sup_difference(pair: PotentialPair) -> float:
    xs = np.linspace(pair.agreement_prefix, 1.0, 801)
    return float(np.max(np.abs(pair.q(xs) - pair.q_tilde(xs))))


def theorem_demo(pair: PotentialPair, config: DemoConfig) -> dict:
    """Structured falsification report for one uniqueness statement.

    Gathers the data the statement takes as given for both potentials of
    the pair, then checks: tails differ => data differ (separation above
    tolerance); coinciding data is flagged as predicting equality.
    """
    t = config.theorem
    if t not in (1, 2, 3, 4):
        raise DomainError("theorem id must be 1..4")
    a = pair.agreement_prefix
    if t == 1 and abs(a - 0.5) > 1e-12:
        raise Inapplicable("statement 1 requires agreement on [0, 1/2]")
    if t == 2 and not a > 0.5:
        raise Inapplicable("statement 2 requires prefix a > 1/2")
    if t == 3 and not a < 0.5:
        raise Inapplicable("statement 3 requires prefix a < 1/2")
    if t in (1, 4) and (pair.q.smoothness is None or pair.q_tilde.smoothness is None):
        raise Inapplicable("statements 1 and 4 require endpoint smoothness data")

    region = _square_region(config.radius)
    zs_q = find_omega_zeros(pair.q, region, config.search_tol, config.search_rtol)
    zs_t = find_omega_zeros(pair.q_tilde, region, config.search_tol, config.search_rtol)
    dist = resonance_distance(zs_q, zs_t, config.radius)
    tail_diff = _tail_sup_difference(pair)

    report = {
        "header": DEMO_HEADER,
        "theorem": t,
        "hypothesis": {
            "agreement_prefix": a,
            "radius": config.radius,
            "separation_tolerance": config.separation_tolerance,
            "potential_digest": pair.q.digest(),
            "potential_tilde_digest": pair.q_tilde.digest(),
        },
        "data": {
            "zeros": [[p.k.real, p.k.imag, p.multiplicity] for p in zs_q.points],
            "zeros_tilde": [[p.k.real, p.k.imag, p.multiplicity] for p in zs_t.points],
        },
        "distances": {
            "resonance_distance": dist,
            "tail_sup_difference": tail_diff,
        },
    }

    if t == 4:
        if any(p.multiplicity > 1 for p in zs_q.points + zs_t.points):
            raise Inapplicable("statement 4 as used requires simple zeros")
        taus, taus_t, labels = [], [], []
        for p in zs_q.points:
            try:
                tv = tau(pair.q, p.k)
            except PoleError:
                tv = complex(math.inf, 0)
            try:
                tw = tau(pair.q_tilde, p.k)
            except PoleError:
                tw = complex(math.inf, 0)
            taus.append(tv)
            taus_t.append(tw)
            labels.append([p.k.real, p.k.imag])
        finite = [
            abs(u - v)
            for u, v in zip(taus, taus_t)
            if math.isfinite(u.real) and math.isfinite(v.real)
        ]
        tau_gap = max(finite) if finite else 0.0
        report["data"]["interior_values"] = [
            {"k": kk, "tau": [u.real, u.imag], "tau_tilde": [v.real, v.imag]}
            for kk, u, v in zip(labels, taus, taus_t)
        ]
        report["distances"]["max_interior_difference"] = tau_gap
        separated = dist > config.separation_tolerance or tau_gap > config.separation_tolerance
    elif t in (2, 3):
        if t == 2:
            sel = make_selector(config.subset, zs_q)
            density = subset_density(zs_q, sel, a, 2, label=config.subset)
        else:
            szs_q = find_s_zeros(pair.q, region, config.search_tol, config.search_rtol)
            szs_t = find_s_zeros(pair.q_tilde, region, config.search_tol, config.search_rtol)
            sel = make_selector(config.subset, szs_q)
            density = subset_density(szs_q, sel, a, 3, label=config.subset)
            report["data"]["sign_sets"] = {
                "sigma": [[d.zeta.real, d.zeta.imag, d.sigma] for d in sign_set(szs_q)],
                "sigma_tilde": [[d.zeta.real, d.zeta.imag, d.sigma] for d in sign_set(szs_t)],
            }
            s_dist = resonance_distance(szs_q, szs_t, config.radius)
            report["distances"]["companion_zero_distance"] = s_dist
        report["density"] = {
            "subset": density.subset_label,
            "radii": density.radii,
            "counts": density.counts,
            "gamma_hat": density.gamma_hat,
            "threshold": density.threshold,
            "meets_threshold": density.meets_threshold,
        }
        separated = dist > config.separation_tolerance
        if t == 3:
            separated = separated or report["distances"]["companion_zero_distance"] > config.separation_tolerance
    else:
        separated = dist > config.separation_tolerance

    if tail_diff > 0.0:
        report["conclusion"] = (
            "data differ, consistent with uniqueness"
            if separated
            else "tails differ but data coincide within tolerance: POTENTIAL COUNTEREXAMPLE"
        )
        report["pass"] = bool(separated)
    else:
        report["conclusion"] = "uniqueness predicts q = q_tilde"
        report["pass"] = True
        report["distances"]["max_tail_difference_given_equal_data"] = tail_diff
    return report
