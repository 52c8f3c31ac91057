"""Exterior-map families with explicit level-curve samplers.

Each family carries a closed-form description of its exterior map (or of
the inverse map), a capacity bookkeeping rule, and a sampler that puts
points exactly on the level curve where the modulus of the map equals r.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .rootfind import roots_after_constant_shifts
from .series import (
    ComplexPolynomial,
    DepthExhaustionError,
    LaurentSeries,
    LaurentSeriesAtInfinity,
    laurent_mul,
    revert_series,
)

__all__ = [
    "Circle",
    "Interval",
    "Lemniscate",
    "InversePolynomialImage",
    "ExplicitMap",
    "CurveFamily",
    "CurveSample",
    "capacity_leading_coefficient",
    "phi_series",
    "sample_level_curve",
    "lemniscate_point_set",
    "joukowski",
    "family_to_json_dict",
    "family_from_json_dict",
]


def joukowski(w):
    """Inverse map for the interval [-1,1]: circles |w|=r to ellipses."""
    w = np.asarray(w, dtype=complex)
    return (w + 1.0 / w) / 2.0


@dataclass(frozen=True)
class Circle:
    """K = circle of the given radius about the origin."""

    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Interval:
    """K = [-1, 1]."""


@dataclass(frozen=True, eq=False)
class Lemniscate:
    """K = {z : |P(z)| = R} for a monic polynomial P of degree >= 1."""

    P: ComplexPolynomial
    R: float = 1.0

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("level R must be positive")
        if self.P.degree < 1:
            raise ValueError("generator degree must be at least 1")
        if not self.P.is_monic(0.0):
            raise ValueError("generator polynomial must be monic")


@dataclass(frozen=True, eq=False)
class InversePolynomialImage:
    """K = P^{-1}([-1,1]) for a real polynomial P with positive leading term.

    When ``alternation_points`` (x_0 < ... < x_m with P(x_k) = (-1)^(m-k))
    are supplied they are checked numerically and the family counts as a
    verified period-m set; otherwise it is accepted unverified.
    """

    P: ComplexPolynomial
    alternation_points: Optional[Sequence[float]] = None

    def __post_init__(self):
        m = self.P.degree
        if m < 1:
            raise ValueError("polynomial degree must be at least 1")
        if np.abs(self.P.coeffs.imag).max() > 0:
            raise ValueError("polynomial must have real coefficients")
        if self.P.coeffs[-1].real <= 0:
            raise ValueError("leading coefficient must be positive")
        if self.alternation_points is not None:
            xs = np.asarray(self.alternation_points, dtype=float)
            if len(xs) != m + 1 or np.any(np.diff(xs) <= 0):
                raise ValueError("need m+1 strictly increasing alternation points")
            want = np.array([(-1.0) ** (m - k) for k in range(m + 1)])
            got = self.P(xs.astype(complex)).real
            if np.abs(got - want).max() > 1e-8:
                raise ValueError("alternation certificate fails numerically")

    @property
    def period_verified(self) -> bool:
        return self.alternation_points is not None


@dataclass(frozen=True, eq=False)
class ExplicitMap:
    """Family given directly by a map series phi and/or its inverse psi."""

    phi: Optional[LaurentSeriesAtInfinity] = None
    psi: Optional[LaurentSeriesAtInfinity] = None

    def __post_init__(self):
        if self.phi is None and self.psi is None:
            raise ValueError("need phi or psi")

    def phi_or_reverted(self, depth: int) -> LaurentSeriesAtInfinity:
        if self.phi is not None:
            if self.phi.depth == depth:
                return self.phi
            return self.phi.truncate(depth)
        return revert_series(self.psi, depth)

    def psi_or_reverted(self) -> LaurentSeriesAtInfinity:
        if self.psi is not None:
            return self.psi
        return revert_series(self.phi, self.phi.depth)


CurveFamily = Union[Circle, Interval, Lemniscate, InversePolynomialImage, ExplicitMap]


@dataclass(frozen=True, eq=False)
class CurveSample:
    """A discretization of one level curve.

    ``thetas`` holds the map-angle parameter of each point; ``phi_values``
    holds the exact map value r*exp(i*theta) at each point for families
    where the sampler knows the branch (None for multi-sheeted families).
    ``degenerate`` flags levels close to a critical value of a lemniscate
    generator, where the curve is not a Jordan curve.
    """

    r: float
    points: np.ndarray
    family: CurveFamily
    thetas: np.ndarray
    phi_values: Optional[np.ndarray] = None
    degenerate: bool = False

    @property
    def size(self) -> int:
        return len(self.points)

    def to_csv_rows(self):
        return [
            (float(t), float(z.real), float(z.imag))
            for t, z in zip(self.thetas, self.points)
        ]


def capacity_leading_coefficient(f: CurveFamily) -> float:
    """Leading map coefficient c; the logarithmic capacity of K is 1/c."""
    if isinstance(f, Circle):
        return 1.0 / f.radius
    if isinstance(f, Interval):
        return 2.0
    if isinstance(f, Lemniscate):
        return float(f.R ** (-1.0 / f.P.degree))
    if isinstance(f, InversePolynomialImage):
        m = f.P.degree
        return float((2.0 * f.P.coeffs[-1].real) ** (1.0 / m))
    if isinstance(f, ExplicitMap):
        if f.phi is not None:
            return f.phi.leading_coefficient
        return 1.0 / f.psi.leading_coefficient
    raise TypeError(f"unknown family {type(f).__name__}")


# -- series construction helpers --------------------------------------------


def _fractional_root(s: LaurentSeries, m: int, n_terms: int) -> LaurentSeries:
    """Principal m-th root of a series with positive real leading coefficient.

    Writes s = a * z^T * (1 + v(u)) and applies the standard recurrence for
    (1+v)^(1/m); T must be divisible by m.  The result keeps n_terms
    coefficients counted down from its top power T/m.
    """
    if s.top % m:
        raise ValueError("top power must be divisible by the root order")
    lead = s.coeffs[-1]
    if not (lead.imag == 0.0 and lead.real > 0):
        raise ValueError("leading coefficient must be positive real")
    if not s.exact and len(s.coeffs) < n_terms:
        raise DepthExhaustionError("series window too shallow for requested root depth")
    # v in the variable u = 1/z: v[j] = coeff of z^(T-j) / lead, v[0] = 1
    v = np.zeros(n_terms, dtype=complex)
    have = min(len(s.coeffs), n_terms)
    v[:have] = s.coeffs[::-1][:have] / lead
    alpha = 1.0 / m
    g = np.zeros(n_terms, dtype=complex)
    g[0] = 1.0
    for k in range(1, n_terms):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            if v[j] != 0:
                acc += ((alpha + 1.0) * j - k) * v[j] * g[k - j]
        g[k] = acc / k
    out_top = s.top // m
    coeffs = (float(lead.real) ** alpha) * g[::-1]
    return LaurentSeries(out_top - (n_terms - 1), coeffs, exact=False)


def _interval_like_map_series(P: ComplexPolynomial, n_terms: int) -> LaurentSeries:
    """Series at infinity of  P(z) + sqrt(P(z)^2 - 1)  (top power = deg P),
    keeping n_terms coefficients down from the top."""
    p_series = P.to_series()
    p2 = laurent_mul(p_series, p_series) - LaurentSeries(0, [1.0], exact=True)
    root = _fractional_root(p2, 2, n_terms)
    return p_series + root


def phi_series(f: CurveFamily, depth: int) -> LaurentSeriesAtInfinity:
    """Map series at infinity with the stated truncation depth.

    For a degree-m lemniscate (and for polynomial preimages) this is the
    principal m-th root branch of the underlying degree-m series; only the
    modulus of the map is single-valued off the branch structure, which is
    all the level curves need.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(f, Circle):
        return LaurentSeriesAtInfinity(
            1.0 / f.radius, np.zeros(depth + 1, dtype=complex), exact=True
        )
    if isinstance(f, Interval):
        s = _interval_like_map_series(ComplexPolynomial([0.0, 1.0]), depth + 2)
        return LaurentSeriesAtInfinity(s.coeffs[-1].real, s.coeffs[:-1][::-1])
    if isinstance(f, Lemniscate):
        m = f.P.degree
        scaled = f.P.to_series().scale(1.0 / f.R)
        root = _fractional_root(scaled, m, depth + 2)
        return LaurentSeriesAtInfinity(root.coeffs[-1].real, root.coeffs[:-1][::-1])
    if isinstance(f, InversePolynomialImage):
        m = f.P.degree
        s = _interval_like_map_series(f.P, depth + 2)
        root = _fractional_root(s, m, depth + 2)
        return LaurentSeriesAtInfinity(root.coeffs[-1].real, root.coeffs[:-1][::-1])
    if isinstance(f, ExplicitMap):
        return f.phi_or_reverted(depth)
    raise TypeError(f"unknown family {type(f).__name__}")


# -- sampling ----------------------------------------------------------------


def _dedup(points: np.ndarray, thetas: np.ndarray, phi_values):
    """Drop near-coincident points (pairwise distance <= 1e-12 * diameter).

    Sweep in real-part order: points within tol of each other are within
    tol in real part, so the sorted window search is exhaustive.
    """
    n = len(points)
    if n < 2:
        return points, thetas, phi_values
    span = max(
        float(points.real.max() - points.real.min()),
        float(points.imag.max() - points.imag.min()),
    )
    tol = 1e-12 * max(span, 1e-300)
    order = np.argsort(points.real, kind="stable")
    keep = np.ones(n, dtype=bool)
    xs = points.real[order]
    for i in range(n):
        a = order[i]
        if not keep[a]:
            continue
        j = i + 1
        while j < n and xs[j] - xs[i] <= tol:
            b = order[j]
            if keep[b] and abs(points[a] - points[b]) <= tol:
                keep[b] = False
            j += 1
    points = points[keep]
    thetas = thetas[keep]
    if phi_values is not None:
        phi_values = phi_values[keep]
    return points, thetas, phi_values


def _lemniscate_degenerate(P: ComplexPolynomial, target_modulus: float) -> bool:
    """Level passes within 1% of a critical value of the generator."""
    dP = P.derivative()
    if dP.degree < 1 and dP.coeffs[0] == 0:
        return False
    try:
        from .rootfind import all_roots

        crit = all_roots(dP).roots if dP.degree >= 1 else np.array([])
    except Exception:
        return False
    if len(crit) == 0:
        return False
    vals = np.abs(P(crit))
    return bool(np.any(np.abs(vals - target_modulus) <= 1e-2 * target_modulus))


def lemniscate_point_set(f: Lemniscate, rho: float, M: int) -> np.ndarray:
    """Points with |P(z)| = rho for any rho > 0.

    Level sets below the Jordan range are still well-defined point sets;
    the exterior-map structure (and sample_level_curve) needs r > 1."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    m = f.P.degree
    J = max(1, int(np.ceil(M / m)))
    targets = rho * np.exp(2j * np.pi * np.arange(J) / J)
    roots = roots_after_constant_shifts(f.P, targets)
    return roots.ravel()


def sample_level_curve(f: CurveFamily, r: float, M: int) -> CurveSample:
    """M points (m * ceil(M/m) for degree-m root families) covering L_r.

    Circle/Interval/ExplicitMap place points via the inverse map at
    r*exp(i*theta_j); root families solve the degree-m target equation per
    angle, all m roots per target, deterministic ordering (theta-major,
    solver root order minor).  Points are deduplicated.
    """
    if r <= 1.0:
        raise ValueError("level r must exceed 1")
    if M < 1:
        raise ValueError("sample size must be positive")
    degenerate = False
    if isinstance(f, Circle):
        thetas = 2.0 * np.pi * np.arange(M) / M
        w = r * np.exp(1j * thetas)
        points = f.radius * w
        phi_values = w
    elif isinstance(f, Interval):
        thetas = 2.0 * np.pi * np.arange(M) / M
        w = r * np.exp(1j * thetas)
        points = joukowski(w)
        phi_values = w
    elif isinstance(f, ExplicitMap):
        thetas = 2.0 * np.pi * np.arange(M) / M
        w = r * np.exp(1j * thetas)
        psi = f.psi_or_reverted()
        points = psi.evaluate(w)
        phi_values = w
    elif isinstance(f, Lemniscate):
        m = f.P.degree
        J = int(np.ceil(M / m))
        thetas_base = 2.0 * np.pi * np.arange(J) / (m * J)
        target_modulus = f.R * r ** m
        targets = target_modulus * np.exp(1j * m * thetas_base)
        roots = roots_after_constant_shifts(f.P, targets)
        points = roots.ravel()
        thetas = np.repeat(thetas_base, m)
        phi_values = None
        degenerate = _lemniscate_degenerate(f.P, target_modulus)
    elif isinstance(f, InversePolynomialImage):
        m = f.P.degree
        J = int(np.ceil(M / m))
        thetas_base = 2.0 * np.pi * np.arange(J) / (m * J)
        rho = r ** m
        targets = joukowski(rho * np.exp(1j * m * thetas_base))
        roots = roots_after_constant_shifts(f.P, targets)
        points = roots.ravel()
        thetas = np.repeat(thetas_base, m)
        phi_values = None
    else:
        raise TypeError(f"unknown family {type(f).__name__}")
    points = np.asarray(points, dtype=complex)
    points, thetas, phi_values = _dedup(points, thetas, phi_values)
    return CurveSample(
        r=float(r),
        points=points,
        family=f,
        thetas=thetas,
        phi_values=phi_values,
        degenerate=degenerate,
    )


# -- JSON family specs -------------------------------------------------------


def _poly_to_pairs(p: ComplexPolynomial):
    return [[float(c.real), float(c.imag)] for c in p.coeffs]


def _poly_from_pairs(pairs) -> ComplexPolynomial:
    return ComplexPolynomial([complex(re, im) for re, im in pairs])


def family_to_json_dict(f: CurveFamily) -> dict:
    if isinstance(f, Circle):
        return {"family": "circle", "R": f.radius}
    if isinstance(f, Interval):
        return {"family": "interval"}
    if isinstance(f, Lemniscate):
        return {"family": "lemniscate", "P": _poly_to_pairs(f.P), "R": f.R}
    if isinstance(f, InversePolynomialImage):
        d = {"family": "inverse-image", "P": _poly_to_pairs(f.P)}
        if f.alternation_points is not None:
            d["alternation_points"] = [float(x) for x in f.alternation_points]
        return d
    if isinstance(f, ExplicitMap):
        d = {"family": "explicit"}
        if f.phi is not None:
            d["phi"] = f.phi.to_json_dict()
        if f.psi is not None:
            d["psi"] = f.psi.to_json_dict()
        return d
    raise TypeError(f"unknown family {type(f).__name__}")


def family_from_json_dict(d: dict) -> CurveFamily:
    kind = d.get("family")
    if kind == "circle":
        return Circle(float(d.get("R", 1.0)))
    if kind == "interval":
        return Interval()
    if kind == "lemniscate":
        return Lemniscate(_poly_from_pairs(d["P"]), float(d.get("R", 1.0)))
    if kind == "inverse-image":
        pts = d.get("alternation_points")
        return InversePolynomialImage(_poly_from_pairs(d["P"]), pts)
    if kind == "explicit":
        phi = LaurentSeriesAtInfinity.from_json_dict(d["phi"]) if "phi" in d else None
        psi = LaurentSeriesAtInfinity.from_json_dict(d["psi"]) if "psi" in d else None
        return ExplicitMap(phi=phi, psi=psi)
    raise ValueError(f"unknown family spec {kind!r}")
