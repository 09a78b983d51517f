"""Exhaustive zero location in rectangles, classification, counting, signs.

The basic primitive is the winding number (1/2pi i) contour integral of
f'/f over a rectangle boundary, evaluated by adaptive panel quadrature with
all pending panels of a refinement round batched into one evaluator call.
Rectangles holding more than one zero are quadrisected, with cut lines
shifted away from zeros until child counts reproduce the parent count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConsistencyError,
    CountMismatchError,
    DomainError,
    NonconvergenceError,
    SearchBudgetError,
    SymmetryViolationError,
    ZeroOnContourError,
)
from . import jost
from .util import gauss_legendre

Region = tuple[float, float, float, float]

_PANEL_TOL = 1e-3  # absolute tolerance per accepted boundary panel
_MAX_PANEL_DEPTH = 14
_CONTOUR_GUARD = 1e-9  # zero-to-contour distance treated as "on the contour"
_MERGE_DIST = 1e-7
_MAX_SUBDIVISION_DEPTH = 40
_MULTIPLE_ZERO_DIAMETER = 1e-6
_CUT_OFFSETS = (
    (0.0, 0.0),
    (0.06, -0.045),
    (-0.11, 0.08),
    (0.17, 0.13),
    (-0.23, -0.19),
    (0.31, 0.27),
    (-0.37, -0.33),
)


@dataclass(frozen=True)
class SpectralPoint:
    """A zero of an entire function with its multiplicity and role."""

    k: complex
    multiplicity: int
    kind: str  # "eigenvalue" | "resonance" | "origin"


@dataclass
class ZeroSet:
    """All zeros found in a rectangle, sorted by (|k|, arg k)."""

    points: list[SpectralPoint]
    region: Region
    residual_bound: float
    function_label: str = "omega"
    potential_digest: str = ""

    def multiplicity_total(self) -> int:
        return sum(p.multiplicity for p in self.points)

    def flattened(self) -> list[complex]:
        """Zeros repeated according to multiplicity."""
        out = []
        for p in self.points:
            out.extend([p.k] * p.multiplicity)
        return out


@dataclass(frozen=True)
class SignDatum:
    """sigma = sign(Im zeta) for a zero zeta of s, with 0 for real zeros."""

    zeta: complex
    sigma: int


@dataclass(frozen=True)
class OriginSign:
    """Multiplicity u of s at k = 0 and the sign of i^u s^(u)(0)/u!."""

    u: int
    sigma0: int


def _validate_region(region: Region) -> Region:
    re0, re1, im0, im1 = (float(v) for v in region)
    if not (re0 < re1 and im0 < im1):
        raise DomainError("region must satisfy re_min < re_max and im_min < im_max")
    return (re0, re1, im0, im1)


def _diameter(region: Region) -> float:
    return math.hypot(region[1] - region[0], region[3] - region[2])


def _sort_key(k: complex):
    ang = math.atan2(k.imag, k.real)
    if ang == math.pi:
        ang = -math.pi
    return (abs(k), ang)


def _panel_integrals(fdf, panels):
    """GL12 integrals of f'/f over complex segments, one batched call."""
    nodes, weights = gauss_legendre(12)
    z0 = np.array([p[0] for p in panels])
    z1 = np.array([p[1] for p in panels])
    pts = z0[:, None] + np.outer(z1 - z0, nodes)
    f, df = fdf(pts.ravel())
    f = np.asarray(f).reshape(pts.shape)
    df = np.asarray(df).reshape(pts.shape)
    bad = np.abs(f) <= np.abs(df) * _CONTOUR_GUARD
    if np.any(bad) or np.any(f == 0):
        raise ZeroOnContourError("a zero lies numerically on the contour")
    vals = (df / f) @ weights
    return vals * (z1 - z0)


def _contour_integral(fdf, region: Region) -> complex:
    re0, re1, im0, im1 = region
    corners = [re0 + 1j * im0, re1 + 1j * im0, re1 + 1j * im1, re0 + 1j * im1]
    queue = []
    seed = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        mid = (a + b) / 2
        seed.extend([(a, mid), (mid, b)])
    ints = _panel_integrals(fdf, seed)
    queue = [(a, b, I, 0) for (a, b), I in zip(seed, ints)]
    total = 0.0 + 0.0j
    while queue:
        children = []
        for a, b, _, _ in queue:
            mid = (a + b) / 2
            children.extend([(a, mid), (mid, b)])
        child_ints = _panel_integrals(fdf, children)
        next_queue = []
        for j, (a, b, parent_int, depth) in enumerate(queue):
            left = child_ints[2 * j]
            right = child_ints[2 * j + 1]
            if abs(parent_int - left - right) <= _PANEL_TOL:
                total += left + right
            elif depth + 1 >= _MAX_PANEL_DEPTH:
                raise NonconvergenceError("contour quadrature did not converge")
            else:
                mid = (a + b) / 2
                next_queue.append((a, mid, left, depth + 1))
                next_queue.append((mid, b, right, depth + 1))
        queue = next_queue
    return total


def _winding(fdf, region: Region) -> int:
    w = _contour_integral(fdf, region) / (2j * math.pi)
    n = round(w.real)
    if abs(w - n) > 0.1:
        raise CountMismatchError(f"winding number {w} is not close to an integer")
    return int(n)


def _inflate(region: Region, amount: float) -> Region:
    re0, re1, im0, im1 = region
    return (re0 - amount, re1 + amount, im0 - amount, im1 + amount)


def count_zeros(fdf, region: Region) -> int:
    """Argument-principle count of zeros (with multiplicity) in a rectangle.

    fdf maps an array of frequencies to the pair (f values, f' values).
    If a zero sits on the boundary the contour is nudged outward once by
    1e-6 times the diameter before giving up.
    """
    region = _validate_region(region)
    try:
        return _winding(fdf, region)
    except ZeroOnContourError:
        return _winding(fdf, _inflate(region, 1e-6 * _diameter(region)))


def _newton(fdf, z0: complex, tol: float, mult: int = 1, step_cap: float = math.inf):
    z = complex(z0)
    best = (math.inf, z)
    converged = False
    leash = 4.0 * step_cap if math.isfinite(step_cap) else math.inf
    for _ in range(60):
        try:
            f, df = fdf(np.array([z]))
        except NonconvergenceError:
            break  # wandered somewhere the evaluator cannot follow
        f, df = complex(f[0]), complex(df[0])
        if not (math.isfinite(abs(f)) and math.isfinite(abs(df))):
            break
        resid = abs(f) / (1.0 + abs(df) * abs(z))
        if resid < best[0]:
            best = (resid, z)
        if converged:
            break
        if resid <= tol * 0.5:
            converged = True  # one more step for the final quadratic gain
        if df == 0:
            z += step_cap * 1e-3 * (1 + 1j)
            continue
        step = mult * f / df
        if abs(step) > step_cap:
            step *= step_cap / abs(step)
        z = z - step
        if abs(z - z0) > leash:
            break  # runaway iteration; the caller subdivides instead
    return best[1], best[0]


def _inside(z: complex, region: Region, slack: float = 0.0) -> bool:
    re0, re1, im0, im1 = region
    return (re0 - slack <= z.real <= re1 + slack) and (im0 - slack <= z.imag <= im1 + slack)


def _cut_line_clear(fdf, a: complex, b: complex) -> bool:
    """Reject a proposed cut if a zero sits within half a sample spacing of it."""
    n = 65
    ts = np.linspace(0.0, 1.0, n)
    pts = a + ts * (b - a)
    f, df = fdf(pts)
    f = np.abs(np.asarray(f))
    df = np.abs(np.asarray(df))
    dist = np.where(df > 0, f / np.maximum(df, 1e-300), math.inf)
    clearance = abs(b - a) / (2 * (n - 1))
    return bool(np.all(dist > clearance))


def _harvest(fdf, region: Region, count: int, tol: float, depth: int, out: list):
    if count == 0:
        return
    re0, re1, im0, im1 = region
    width, height = re1 - re0, im1 - im0
    diam = math.hypot(width, height)
    center = complex((re0 + re1) / 2, (im0 + im1) / 2)

    if diam < _MULTIPLE_ZERO_DIAMETER:
        z, _ = _newton(fdf, center, tol, mult=count, step_cap=diam)
        if not _inside(z, region, slack=diam):
            z = center
        out.append((z, count))
        return
    if count == 1:
        z, resid = _newton(fdf, center, tol, step_cap=2.0 * diam)
        if resid <= tol and _inside(z, region, slack=1e-9 * (1 + abs(z))):
            out.append((z, 1))
            return
        # retry from the best of a coarse |f| scan before subdividing further
        gx, gy = np.meshgrid(np.linspace(re0, re1, 7)[1:-1], np.linspace(im0, im1, 7)[1:-1])
        grid = (gx + 1j * gy).ravel()
        f, _ = fdf(grid)
        z, resid = _newton(fdf, grid[int(np.argmin(np.abs(f)))], tol, step_cap=2.0 * diam)
        if resid <= tol and _inside(z, region, slack=1e-9 * (1 + abs(z))):
            out.append((z, 1))
            return
    if depth >= _MAX_SUBDIVISION_DEPTH:
        raise SearchBudgetError("subdivision depth budget exhausted")

    # the sampled pre-check resolves zero-to-line distances of about
    # len/128, useful only once boxes are small; large boxes go straight to
    # the child windings and fall through to the next offset on failure
    precheck = min(width, height) <= 16.0
    for ox, oy in _CUT_OFFSETS:
        cx = (re0 + re1) / 2 + ox * width
        cy = (im0 + im1) / 2 + oy * height
        try:
            if precheck and not _cut_line_clear(fdf, cx + 1j * im0, cx + 1j * im1):
                continue
            if precheck and not _cut_line_clear(fdf, re0 + 1j * cy, re1 + 1j * cy):
                continue
            quads = [
                (re0, cx, im0, cy),
                (cx, re1, im0, cy),
                (re0, cx, cy, im1),
                (cx, re1, cy, im1),
            ]
            counts = [_winding(fdf, quad) for quad in quads]
        except (ZeroOnContourError, CountMismatchError, NonconvergenceError):
            continue
        if sum(counts) != count:
            continue
        for quad, c in zip(quads, counts):
            _harvest(fdf, quad, c, tol, depth + 1, out)
        return
    raise CountMismatchError("could not place cut lines consistent with the parent count")


def classify(k: complex, multiplicity: int = 1, strict_axis: bool = True) -> SpectralPoint:
    """Assign eigenvalue / resonance / origin to a zero location.

    Any zero with Im k > 1e-8 must lie on the imaginary axis when
    strict_axis is set (that is a structural fact for the Wronskian's
    zeros); searches over the companion function s disable the check.
    """
    k = complex(k)
    if abs(k) <= 1e-10:
        if strict_axis and multiplicity > 1:
            raise ConsistencyError("a zero at the origin must be simple")
        return SpectralPoint(k, multiplicity, "origin")
    if k.imag > 1e-8:
        if strict_axis and abs(k.real) > 1e-8 * (1.0 + abs(k)):
            raise ConsistencyError(f"upper-half-plane zero off the imaginary axis: {k}")
        return SpectralPoint(k, multiplicity, "eigenvalue")
    return SpectralPoint(k, multiplicity, "resonance")


def find_zeros(
    fdf,
    region: Region,
    tol: float = 1e-10,
    *,
    polish_fdf=None,
    strict_axis: bool = True,
    function_label: str = "omega",
    potential_digest: str = "",
) -> ZeroSet:
    """All zeros of f in a rectangle, with multiplicities, by recursive
    quadrisection of the argument-principle count plus Newton polishing.

    fdf is the (f, f') evaluator used for counting; polish_fdf, when given,
    is a tighter evaluator used for Newton refinement and residuals.
    """
    if tol < 1e-12:
        raise DomainError("tolerance below 1e-12 is not supported")
    region = _validate_region(region)
    polish = polish_fdf or fdf

    try:
        total = _winding(fdf, region)
        effective = region
    except ZeroOnContourError:
        effective = _inflate(region, 1e-6 * _diameter(region))
        total = _winding(fdf, effective)

    raw: list[tuple[complex, int]] = []
    _harvest(fdf, effective, total, max(tol * 10, 1e-8), 0, raw)

    polished: list[tuple[complex, int]] = []
    for z, mult in raw:
        zp, _ = _newton(polish, z, tol, mult=mult, step_cap=1.0 + abs(z))
        polished.append((zp, mult))

    merged: list[tuple[complex, int]] = []
    for z, mult in sorted(polished, key=lambda t: _sort_key(t[0])):
        for i, (zm, mm) in enumerate(merged):
            if abs(z - zm) < _MERGE_DIST:
                merged[i] = (zm, mm + mult)
                break
        else:
            merged.append((z, mult))

    if sum(m for _, m in merged) != total:
        raise CountMismatchError("harvested multiplicities disagree with the region count")

    points = sorted(
        (classify(z, m, strict_axis=strict_axis) for z, m in merged),
        key=lambda p: _sort_key(p.k),
    )
    if points:
        f, df = polish(np.array([p.k for p in points]))
        residual = float(
            np.max(np.abs(f) / (1.0 + np.abs(df) * np.abs([p.k for p in points])))
        )
    else:
        residual = 0.0
    return ZeroSet(
        points=points,
        region=region,
        residual_bound=residual,
        function_label=function_label,
        potential_digest=potential_digest,
    )


def find_omega_zeros(q, region: Region, tol: float = 1e-10, search_rtol: float = 1e-9) -> ZeroSet:
    """Zero set of the Wronskian function of a potential over a rectangle."""
    return find_zeros(
        jost.omega_evaluator(q, rtol=search_rtol),
        region,
        tol,
        polish_fdf=jost.omega_evaluator(q),
        function_label="omega",
        potential_digest=q.digest(),
    )


def find_s_zeros(q, region: Region, tol: float = 1e-10, search_rtol: float = 1e-9) -> ZeroSet:
    """Zero set of the companion function s over a rectangle."""
    return find_zeros(
        jost.s_evaluator(q, rtol=search_rtol),
        region,
        tol,
        polish_fdf=jost.s_evaluator(q),
        strict_axis=False,
        function_label="s",
        potential_digest=q.digest(),
    )


def coverage_radius(region: Region) -> float:
    """Radius of the largest origin-centered disk inside the rectangle."""
    re0, re1, im0, im1 = region
    r = min(-re0, re1, -im0, im1)
    return max(r, 0.0)


def restrict_to_disk(zs: ZeroSet, radius: float) -> ZeroSet:
    """Sub-zero-set covering exactly the disk |k| <= radius."""
    if coverage_radius(zs.region) + 1e-12 < radius:
        raise DomainError(
            f"zero set covers radius {coverage_radius(zs.region)}, requested {radius}"
        )
    pts = [p for p in zs.points if abs(p.k) <= radius]
    return ZeroSet(
        points=pts,
        region=(-radius, radius, -radius, radius),
        residual_bound=zs.residual_bound,
        function_label=zs.function_label,
        potential_digest=zs.potential_digest,
    )


def counting_function(zs: ZeroSet, radii) -> list[tuple[float, int]]:
    """Cumulative zero counts N(r) = #{|k_j| <= r} with multiplicity."""
    cov = coverage_radius(zs.region)
    out = []
    for r in radii:
        r = float(r)
        if r > cov + 1e-12:
            raise DomainError(f"radius {r} exceeds the searched coverage radius {cov}")
        out.append((r, sum(p.multiplicity for p in zs.points if abs(p.k) <= r)))
    return out


def sign_set(zeros_of_s: ZeroSet) -> list[SignDatum]:
    """sigma_j = sign(Im zeta_j) with the |Im| <= 1e-8 band mapped to 0."""
    out = []
    for p in zeros_of_s.points:
        if abs(p.k.imag) <= 1e-8:
            sigma = 0
        else:
            sigma = 1 if p.k.imag > 0 else -1
        out.extend([SignDatum(p.k, sigma)] * p.multiplicity)
    return out


def origin_data(f, radius: float = 0.25, nodes: int = 256) -> OriginSign:
    """Leading Taylor data of an analytic f at 0 from a Cauchy circle.

    f maps an array of frequencies to values; u is the index of the first
    coefficient that is not negligible, sigma0 the sign of Re(i^u c_u).
    """
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    z = radius * np.exp(1j * theta)
    vals = np.asarray(f(z))
    coeffs = np.array([np.mean(vals * z ** (-n)) for n in range(8)])
    if not np.all(np.isfinite(coeffs)):
        raise DomainError("function is not finite on the sampling circle")
    top = np.max(np.abs(coeffs))
    # 1e-12 floor: below that the samples are evaluator noise, not structure
    if top <= 1e-12:
        raise DomainError("function vanishes to high order at the origin")
    sig = np.abs(coeffs) > 1e-9 * top
    if not np.any(sig):
        raise DomainError("function vanishes to high order at the origin")
    u = int(np.argmax(sig))
    lead = (1j**u) * coeffs[u]
    if abs(lead.imag) > 1e-6 * abs(lead):
        raise SymmetryViolationError(
            f"i^u c_u = {lead} is not real; conjugation symmetry violated"
        )
    return OriginSign(u=u, sigma0=1 if lead.real > 0 else -1)


def mirror_defect(zs: ZeroSet) -> float:
    """Largest distance from -conj(k) of a zero to the nearest zero, over
    zeros whose mirror lies in the region; 0 for an empty or axis-only set."""
    pts = [p.k for p in zs.points]
    worst = 0.0
    for k in pts:
        mk = -k.conjugate()
        if not _inside(mk, zs.region):
            continue
        worst = max(worst, min(abs(mk - other) for other in pts))
    return worst


def zero_set_to_dict(zs: ZeroSet) -> dict:
    return {
        "region": list(zs.region),
        "zeros": [
            {"re": p.k.real, "im": p.k.imag, "multiplicity": p.multiplicity, "kind": p.kind}
            for p in zs.points
        ],
        "function": zs.function_label,
        "potential_digest": zs.potential_digest,
        "residual_bound": zs.residual_bound,
    }


def zero_set_from_dict(data: dict) -> ZeroSet:
    try:
        region = tuple(float(v) for v in data["region"])
        if len(region) != 4:
            raise ValueError("region needs 4 numbers")
        points = [
            SpectralPoint(
                complex(float(z["re"]), float(z["im"])),
                int(z["multiplicity"]),
                str(z["kind"]),
            )
            for z in data["zeros"]
        ]
        labels = {p.kind for p in points} - {"eigenvalue", "resonance", "origin"}
        if labels:
            raise ValueError(f"unknown zero kinds {sorted(labels)}")
        return ZeroSet(
            points=sorted(points, key=lambda p: _sort_key(p.k)),
            region=_validate_region(region),
            residual_bound=float(data.get("residual_bound", 0.0)),
            function_label=str(data.get("function", "omega")),
            potential_digest=str(data.get("potential_digest", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed zero-set data: {exc}") from exc
