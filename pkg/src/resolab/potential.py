"""Real potentials supported in [0, 1]: representations, constructions, file format.

Every representation evaluates to exactly 0 outside [0, 1] and exposes its
non-smooth points so the ODE integrator can place step boundaries on them.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import DomainError, PotentialFormatError
from .util import canonical_json


class Smoothness(NamedTuple):
    """One-sided endpoint smoothness data (m, n, delta).

    m (resp. n) is the order of the first nonvanishing derivative of q at 0
    (resp. at 1); delta is the width of the one-sided neighborhoods on which
    that smoothness holds.
    """

    m: int
    n: int
    delta: float


def _as_smoothness(value) -> Smoothness | None:
    if value is None:
        return None
    m, n, delta = value
    if int(m) != m or int(n) != n or m < 0 or n < 0:
        raise PotentialFormatError("smoothness orders must be nonnegative integers")
    if not 0.0 < float(delta) < 1.0:
        raise PotentialFormatError("smoothness delta must lie in (0, 1)")
    return Smoothness(int(m), int(n), float(delta))


def _require_real(values, what):
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        raise PotentialFormatError(f"{what} must be real-valued")
    arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise PotentialFormatError(f"{what} must be finite")
    return arr


@dataclass(frozen=True)
class Potential:
    """Base class; concrete representations implement the evaluation hooks."""

    smoothness: Smoothness | None = dataclasses.field(default=None, kw_only=True)

    def __call__(self, x):
        """Value of q at x (scalar or array); exactly 0 outside [0, 1]."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.zeros_like(arr)
        inside = (arr >= 0.0) & (arr <= 1.0)
        if np.any(inside):
            out[inside] = self._eval_inside(arr[inside])
        return float(out[0]) if scalar else out

    def _eval_inside(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior points of (0, 1) where the representation is not smooth."""
        return ()

    def reflect(self) -> "Potential":
        raise NotImplementedError

    def as_pieces(self) -> tuple[np.ndarray, list[np.ndarray]]:
        """Exact piecewise-polynomial form: (edges over [0,1], ascending
        coefficients in the local variable x - left_edge, one per piece)."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def with_smoothness(self, m: int, n: int, delta: float) -> "Potential":
        return dataclasses.replace(self, smoothness=Smoothness(m, n, delta))

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()

    def _dict_base(self, d: dict) -> dict:
        if self.smoothness is not None:
            s = self.smoothness
            d["smoothness"] = {"m": s.m, "n": s.n, "delta": s.delta}
        return d


@dataclass(frozen=True)
class SquareWell(Potential):
    """Constant potential of the given amplitude on [0, 1]."""

    amplitude: float = 0.0

    def __post_init__(self):
        amp = float(_require_real(self.amplitude, "amplitude"))
        object.__setattr__(self, "amplitude", amp)
        if self.smoothness is None and amp != 0.0:
            object.__setattr__(self, "smoothness", Smoothness(0, 0, 0.5))

    def _eval_inside(self, x):
        return np.full_like(x, self.amplitude)

    def reflect(self):
        return dataclasses.replace(self)

    def as_pieces(self):
        return np.array([0.0, 1.0]), [np.array([self.amplitude])]

    def to_dict(self):
        return self._dict_base({"type": "square_well", "amplitude": self.amplitude})


@dataclass(frozen=True)
class StepPotential(Potential):
    """Piecewise-constant levels between increasing breakpoints in [0, 1]."""

    edges: tuple[float, ...] = (0.0, 1.0)
    levels: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        edges = tuple(float(v) for v in _require_real(self.edges, "breakpoints"))
        levels = tuple(float(v) for v in _require_real(self.levels, "levels"))
        if len(edges) < 2 or len(levels) != len(edges) - 1:
            raise PotentialFormatError("step needs n breakpoints and n-1 levels")
        if any(b >= a for a, b in zip(edges[1:], edges)) or edges[0] < 0 or edges[-1] > 1:
            raise PotentialFormatError("step breakpoints must increase within [0, 1]")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "levels", levels)

    def _eval_inside(self, x):
        # pieces are (e_i, e_{i+1}]: an interior edge takes its left piece's
        # value, so splices keep the prefix value at the splice point
        out = np.zeros_like(x)
        inside = (x >= self.edges[0]) & (x <= self.edges[-1])
        idx = np.clip(np.searchsorted(self.edges, x[inside], side="left") - 1, 0, len(self.levels) - 1)
        out[inside] = np.asarray(self.levels)[idx]
        return out

    @property
    def breakpoints(self):
        return tuple(e for e in self.edges if 0.0 < e < 1.0)

    def reflect(self):
        return dataclasses.replace(
            self,
            edges=tuple(1.0 - e for e in reversed(self.edges)),
            levels=tuple(reversed(self.levels)),
        )

    def as_pieces(self):
        edges = list(self.edges)
        coeffs = [np.array([lv]) for lv in self.levels]
        if edges[0] > 0.0:
            edges.insert(0, 0.0)
            coeffs.insert(0, np.array([0.0]))
        if edges[-1] < 1.0:
            edges.append(1.0)
            coeffs.append(np.array([0.0]))
        return np.array(edges), coeffs

    def to_dict(self):
        return self._dict_base(
            {"type": "step", "breakpoints": list(self.edges), "levels": list(self.levels)}
        )


def _shift_poly(coeffs: np.ndarray, delta: float) -> np.ndarray:
    """Re-express sum c_j t^j in powers of (t - delta)."""
    out = np.zeros_like(coeffs)
    for j, c in enumerate(coeffs):
        for i in range(j + 1):
            out[i] += c * math.comb(j, i) * delta ** (j - i)
    return out


@dataclass(frozen=True)
class PiecewisePoly(Potential):
    """Polynomial pieces between breakpoints, coefficients in x - left_edge."""

    edges: tuple[float, ...] = (0.0, 1.0)
    coefficients: tuple[tuple[float, ...], ...] = ((0.0,),)

    def __post_init__(self):
        edges = tuple(float(v) for v in _require_real(self.edges, "breakpoints"))
        if len(edges) < 2 or len(self.coefficients) != len(edges) - 1:
            raise PotentialFormatError("piecewise_poly needs n breakpoints and n-1 coefficient lists")
        if any(b >= a for a, b in zip(edges[1:], edges)) or edges[0] < 0 or edges[-1] > 1:
            raise PotentialFormatError("breakpoints must increase within [0, 1]")
        coeffs = tuple(
            tuple(float(v) for v in _require_real(c, "coefficients")) for c in self.coefficients
        )
        if any(len(c) == 0 for c in coeffs):
            raise PotentialFormatError("each piece needs at least one coefficient")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "coefficients", coeffs)

    def _eval_inside(self, x):
        out = np.zeros_like(x)
        inside = (x >= self.edges[0]) & (x <= self.edges[-1])
        xi = x[inside]
        idx = np.clip(np.searchsorted(self.edges, xi, side="left") - 1, 0, len(self.coefficients) - 1)
        vals = np.zeros_like(xi)
        for i, coeff in enumerate(self.coefficients):
            sel = idx == i
            if np.any(sel):
                t = xi[sel] - self.edges[i]
                vals[sel] = np.polynomial.polynomial.polyval(t, np.asarray(coeff))
        out[inside] = vals
        return out

    @property
    def breakpoints(self):
        return tuple(e for e in self.edges if 0.0 < e < 1.0)

    def reflect(self):
        new_edges = tuple(1.0 - e for e in reversed(self.edges))
        new_coeffs = []
        for i in reversed(range(len(self.coefficients))):
            c = np.asarray(self.coefficients[i], dtype=float)
            width = self.edges[i + 1] - self.edges[i]
            # q(1-x) on the mirrored piece: substitute t -> width - t
            flipped = _shift_poly(c * (-1.0) ** np.arange(len(c)), -width)
            new_coeffs.append(tuple(flipped))
        return dataclasses.replace(self, edges=new_edges, coefficients=tuple(new_coeffs))

    def as_pieces(self):
        edges = list(self.edges)
        coeffs = [np.asarray(c, dtype=float) for c in self.coefficients]
        if edges[0] > 0.0:
            edges.insert(0, 0.0)
            coeffs.insert(0, np.array([0.0]))
        if edges[-1] < 1.0:
            edges.append(1.0)
            coeffs.append(np.array([0.0]))
        return np.array(edges), coeffs

    def to_dict(self):
        return self._dict_base(
            {
                "type": "piecewise_poly",
                "breakpoints": list(self.edges),
                "coefficients": [list(c) for c in self.coefficients],
            }
        )


@dataclass(frozen=True)
class GridPotential(Potential):
    """Equispaced samples on [0, 1] with exact interpolation of order 0, 1 or 3."""

    samples: tuple[float, ...] = (0.0, 0.0)
    interpolation: int = 1

    def __post_init__(self):
        samples = tuple(float(v) for v in _require_real(self.samples, "samples"))
        if self.interpolation not in (0, 1, 3):
            raise PotentialFormatError("interpolation order must be 0, 1 or 3")
        need = 4 if self.interpolation == 3 else 2
        if len(samples) < need:
            raise PotentialFormatError(f"order {self.interpolation} needs at least {need} samples")
        object.__setattr__(self, "samples", samples)

    @property
    def _xs(self):
        return np.linspace(0.0, 1.0, len(self.samples))

    def _spline(self):
        return CubicSpline(self._xs, np.asarray(self.samples))

    def _eval_inside(self, x):
        s = np.asarray(self.samples)
        if self.interpolation == 0:
            idx = np.clip(np.rint(x * (len(s) - 1)).astype(int), 0, len(s) - 1)
            return s[idx]
        if self.interpolation == 1:
            return np.interp(x, self._xs, s)
        return self._spline()(x)

    @property
    def breakpoints(self):
        xs = self._xs
        if self.interpolation == 0:
            mids = (xs[:-1] + xs[1:]) / 2.0
            return tuple(float(v) for v in mids)
        return tuple(float(v) for v in xs[1:-1])

    def reflect(self):
        return dataclasses.replace(self, samples=tuple(reversed(self.samples)))

    def as_pieces(self):
        xs = self._xs
        s = np.asarray(self.samples)
        if self.interpolation == 0:
            mids = (xs[:-1] + xs[1:]) / 2.0
            edges = np.concatenate([[0.0], mids, [1.0]])
            return edges, [np.array([v]) for v in s]
        if self.interpolation == 1:
            h = xs[1] - xs[0]
            coeffs = [np.array([s[i], (s[i + 1] - s[i]) / h]) for i in range(len(s) - 1)]
            return xs.copy(), coeffs
        cs = self._spline()
        coeffs = [cs.c[::-1, i].copy() for i in range(cs.c.shape[1])]
        return xs.copy(), coeffs

    def to_dict(self):
        return self._dict_base(
            {"type": "grid", "samples": list(self.samples), "interpolation": self.interpolation}
        )


@dataclass(frozen=True)
class Bump(Potential):
    """q(x) = A x^m (1-x)^n on [0, 1].

    The first m-1 derivatives vanish at 0 and the first n-1 at 1, with the
    m-th and n-th nonzero, so the endpoint smoothness data is (m, n).
    """

    m: int = 0
    n: int = 0
    amplitude: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 0 or self.n < 0:
            raise PotentialFormatError("bump exponents must be nonnegative integers")
        amp = float(_require_real(self.amplitude, "amplitude"))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "amplitude", amp)
        if self.smoothness is None and amp != 0.0:
            object.__setattr__(self, "smoothness", Smoothness(self.m, self.n, 0.5))

    def _eval_inside(self, x):
        return self.amplitude * x**self.m * (1.0 - x) ** self.n

    def reflect(self):
        refl = Bump(m=self.n, n=self.m, amplitude=self.amplitude)
        if self.smoothness is not None and self.smoothness != Smoothness(self.m, self.n, 0.5):
            s = self.smoothness
            refl = refl.with_smoothness(s.n, s.m, s.delta)
        return refl

    def as_pieces(self):
        coeff = np.zeros(self.m + self.n + 1)
        for j in range(self.n + 1):
            coeff[self.m + j] = self.amplitude * math.comb(self.n, j) * (-1.0) ** j
        return np.array([0.0, 1.0]), [coeff]

    def to_dict(self):
        return self._dict_base(
            {"type": "bump", "m": self.m, "n": self.n, "amplitude": self.amplitude}
        )


def evaluate(q: Potential, x):
    """Value of q at x; exactly 0 outside [0, 1]."""
    return q(x)


def reflect(q: Potential) -> Potential:
    """The space-reversed potential x -> q(1 - x)."""
    return q.reflect()


def splice(q: Potential, tail: Potential, a: float) -> Potential:
    """Potential equal to q on [0, a] and to tail on (a, 1].

    The result is an exact piecewise-polynomial; prefix pieces are carried
    over verbatim so splices of the same prefix agree bitwise there.
    """
    if not 0.0 <= a <= 1.0:
        raise DomainError("splice point must lie in [0, 1]")
    edges_q, coeffs_q = q.as_pieces()
    edges_t, coeffs_t = tail.as_pieces()
    edges: list[float] = [0.0]
    coeffs: list[tuple[float, ...]] = []
    for i in range(len(coeffs_q)):
        lo, hi = edges_q[i], edges_q[i + 1]
        if lo >= a:
            break
        edges.append(min(hi, a))
        coeffs.append(tuple(coeffs_q[i]))
    if edges[-1] < a:
        edges.append(a)
        coeffs.append((0.0,))
    if a < 1.0:
        for i in range(len(coeffs_t)):
            lo, hi = edges_t[i], edges_t[i + 1]
            if hi <= a:
                continue
            cut = max(lo, a)
            shifted = coeffs_t[i] if cut == lo else _shift_poly(np.asarray(coeffs_t[i]), cut - lo)
            edges.append(hi)
            coeffs.append(tuple(np.asarray(shifted)))
    return PiecewisePoly(edges=tuple(edges), coefficients=tuple(coeffs))


def l1_tail(q: Potential, x: float) -> float:
    """Integral of |q| over [x, 1] by adaptive quadrature (rel. tol 1e-10)."""
    if not 0.0 <= x <= 1.0:
        raise DomainError("l1_tail requires x in [0, 1]")
    if x >= 1.0:
        return 0.0
    pts = [b for b in q.breakpoints if x < b < 1.0]
    val, _ = quad(lambda t: abs(q(t)), x, 1.0, points=pts or None, limit=200, epsrel=1e-10, epsabs=1e-13)
    return float(val)


def endpoint_mass(q: Potential, window: float = 0.05) -> tuple[float, float]:
    """Mass of |q| in the leading and trailing windows of the support."""
    lead = l1_tail(q, 0.0) - l1_tail(q, window)
    trail = l1_tail(q, 1.0 - window)
    return lead, trail


def is_identically_zero(q: Potential) -> bool:
    return l1_tail(q, 0.0) == 0.0


@dataclass(frozen=True)
class PotentialPair:
    """Two potentials that agree on the prefix [0, a].

    Agreement is checked exactly on a dense grid, so pairs should be built
    from shared prefix pieces (see pair_with_tail).
    """

    q: Potential
    q_tilde: Potential
    agreement_prefix: float

    def __post_init__(self):
        a = float(self.agreement_prefix)
        if not 0.0 <= a <= 1.0:
            raise DomainError("agreement prefix must lie in [0, 1]")
        object.__setattr__(self, "agreement_prefix", a)
        grid = np.linspace(0.0, a, 1001)
        if not np.array_equal(self.q(grid), self.q_tilde(grid)):
            raise PotentialFormatError("pair potentials differ on the agreement prefix")


def pair_with_tail(q: Potential, tail: Potential, a: float) -> PotentialPair:
    """Pair (q, q-with-new-tail) agreeing bitwise on [0, a].

    Endpoint smoothness survives the splice: the left order comes from q,
    the right order from the tail, with the smoothness windows capped so
    they stay clear of the splice point.
    """
    q_c = splice(q, q, a)
    qt_c = splice(q, tail, a)
    if q.smoothness is not None:
        q_c = q_c.with_smoothness(*q.smoothness)
        if tail.smoothness is not None and 0.0 < a < 1.0:
            delta = min(q.smoothness.delta, tail.smoothness.delta, a, 1.0 - a)
            qt_c = qt_c.with_smoothness(q.smoothness.m, tail.smoothness.n, delta)
    elif a == 0.0 and tail.smoothness is not None:
        qt_c = qt_c.with_smoothness(*tail.smoothness)
    return PotentialPair(q_c, qt_c, a)


_LOADERS = {
    "square_well": (SquareWell, {"amplitude"}),
    "step": (StepPotential, {"breakpoints", "levels"}),
    "piecewise_poly": (PiecewisePoly, {"breakpoints", "coefficients"}),
    "grid": (GridPotential, {"samples", "interpolation"}),
    "bump": (Bump, {"m", "n", "amplitude"}),
}


def potential_from_dict(data: dict) -> Potential:
    if not isinstance(data, dict):
        raise PotentialFormatError("potential description must be a JSON object")
    kind = data.get("type")
    if kind not in _LOADERS:
        raise PotentialFormatError(f"unknown potential type {kind!r}")
    cls, fields = _LOADERS[kind]
    extra = set(data) - fields - {"type", "smoothness"}
    if extra:
        raise PotentialFormatError(f"unknown fields for {kind}: {sorted(extra)}")
    missing = fields - set(data)
    if missing:
        raise PotentialFormatError(f"missing fields for {kind}: {sorted(missing)}")
    smooth = None
    if "smoothness" in data:
        sdata = data["smoothness"]
        if not isinstance(sdata, dict) or set(sdata) != {"m", "n", "delta"}:
            raise PotentialFormatError('smoothness must be {"m", "n", "delta"}')
        smooth = _as_smoothness((sdata["m"], sdata["n"], sdata["delta"]))
    kwargs = {}
    for field in fields:
        value = data[field]
        if field == "breakpoints":
            kwargs["edges"] = tuple(value)
        elif field == "coefficients":
            kwargs["coefficients"] = tuple(tuple(c) for c in value)
        elif field in ("levels", "samples"):
            kwargs[field] = tuple(value)
        else:
            kwargs[field] = value
    pot = cls(**kwargs)
    if smooth is not None:
        pot = dataclasses.replace(pot, smoothness=smooth)
    return pot


def load_potential(path) -> Potential:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PotentialFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    except OSError as exc:
        raise PotentialFormatError(f"{path}: {exc}") from exc
    try:
        return potential_from_dict(data)
    except PotentialFormatError as exc:
        raise PotentialFormatError(f"{path}: {exc}") from exc


def dump_potential(q: Potential) -> str:
    return canonical_json(q.to_dict())
