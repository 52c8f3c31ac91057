"""Discrete complex Chebyshev problem via Lawson's reweighted least squares.

The inner solve minimizes a weighted L2 norm over monic polynomials in a
centered/scaled basis; the Lawson loop reweights by residual magnitude so
the weighted-LS solutions converge to the discrete minimax solution.  The
duality gap (max residual minus weighted mean residual) certifies
convergence: it vanishes exactly at the discrete Chebyshev polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curves import CurveFamily, CurveSample, sample_level_curve
from .series import ComplexPolynomial

__all__ = [
    "RankDeficiencyError",
    "SolveOptions",
    "MinimaxSolution",
    "weighted_ls_monic",
    "chebyshev_on_points",
    "solve_chebyshev",
    "sup_norm_on_curve",
]


class RankDeficiencyError(ValueError):
    """The weighted least-squares system does not determine the polynomial."""


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for the Lawson loop.

    ``tol_rel`` bounds the relative duality gap; ``adapt_tol`` is the
    relative sup-norm stabilization threshold for sample doubling (kept
    separate from tol_rel so loose gap tolerances do not coarsen the
    discretization); ``max_refine`` caps the number of doublings.
    """

    tol_rel: float = 1e-10
    max_iter: int = 2000
    adapt: bool = True
    adapt_tol: float = 1e-8
    max_refine: int = 6
    track_history: bool = False


@dataclass(frozen=True, eq=False)
class MinimaxSolution:
    polynomial: ComplexPolynomial
    sup_norm: float
    weights: np.ndarray
    iterations: int
    converged: bool
    equioscillation_gap: float
    basis_center: complex
    basis_scale: float
    geo_mean_history: Optional[np.ndarray] = None

    def to_json_dict(self, n: int | None = None, r: float | None = None) -> dict:
        return {
            "n": self.polynomial.degree if n is None else n,
            "r": r,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.polynomial.coeffs],
            "sup_norm": self.sup_norm,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _shifted_monomial_matrix(zeta: np.ndarray, n: int) -> np.ndarray:
    # columns zeta^0 .. zeta^(n-1)
    return np.vander(zeta, n, increasing=True) if n > 0 else np.zeros((len(zeta), 0))


def _rescale_coefficients(coef: np.ndarray, center: complex, scale: float, n: int) -> np.ndarray:
    """Expand  scale^n * zeta^n + sum coef[k] zeta^k,  zeta=(z-center)/scale,
    into ascending z-coefficients; the leading coefficient is forced to 1."""
    lin = np.array([-center / scale, 1.0 / scale], dtype=complex)
    out = np.array([scale ** n], dtype=complex)
    for k in range(n - 1, -1, -1):
        out = np.convolve(out, lin)
        out[0] += coef[k]
    out[-1] = 1.0
    return out


def weighted_ls_monic(
    points: np.ndarray,
    weights: np.ndarray,
    n: int,
    center: complex,
    scale: float,
) -> ComplexPolynomial:
    """Monic degree-n minimizer of the weighted squared residual sum.

    Solves min_p sum_j w_j |p(z_j)|^2 over monic p by an orthogonal-
    factorization least-squares solve in the basis ((z-center)/scale)^k,
    then maps back to plain coefficients.  Raises RankDeficiencyError when
    the (weighted) points cannot pin down the n free coefficients.
    """
    points = np.asarray(points, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    if len(points) <= n:
        raise RankDeficiencyError(f"need more than {n} points, got {len(points)}")
    if scale <= 0:
        raise ValueError("scale must be positive")
    zeta = (points - center) / scale
    sw = np.sqrt(weights)
    target = (scale ** n) * zeta ** n
    if n == 0:
        return ComplexPolynomial([1.0])
    design = _shifted_monomial_matrix(zeta, n) * sw[:, None]
    rhs = -target * sw
    coef, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < n:
        raise RankDeficiencyError(
            f"weighted points have rank {rank} < {n} free coefficients"
        )
    return ComplexPolynomial(_rescale_coefficients(coef, center, scale, n))


def _lawson(points, n, opts: SolveOptions, initial_weights=None):
    """One Lawson run on a fixed point set; returns a MinimaxSolution."""
    M = len(points)
    center = complex(points.mean())
    scale = float(np.abs(points - center).max())
    if scale == 0:
        raise RankDeficiencyError("all points coincide")
    zeta = (points - center) / scale
    V = _shifted_monomial_matrix(zeta, n)
    target = (scale ** n) * zeta ** n

    if initial_weights is None:
        w = np.full(M, 1.0 / M)
    else:
        w = np.asarray(initial_weights, dtype=float)
        if len(w) != M or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("initial weights must be nonnegative over the points")
        w = w / w.sum()
    best_coef = None
    min_sup = np.inf
    gap = np.inf
    converged = False
    history = [] if opts.track_history else None
    iterations = 0
    for it in range(1, opts.max_iter + 1):
        iterations = it
        sw = np.sqrt(w)
        coef, _, rank, _ = np.linalg.lstsq(V * sw[:, None], -target * sw, rcond=None)
        if rank < n:
            raise RankDeficiencyError(
                f"weighted points have rank {rank} < {n} free coefficients"
            )
        resid = np.abs(V @ coef + target) if n > 0 else np.abs(target)
        sup = float(resid.max())
        mean = float(w @ resid)
        gap = (sup - mean) / sup if sup > 0 else 0.0
        if history is not None:
            with np.errstate(divide="ignore"):
                logs = np.log(resid, out=np.full(M, -np.inf), where=resid > 0)
            history.append(float(np.sum(w * logs, where=w > 0)))
        min_sup = min(min_sup, sup)
        # best-by-sup tracking; equal-within-tolerance ties go to the later iterate
        if sup <= min_sup * (1.0 + opts.tol_rel):
            best_coef = coef
        if gap < opts.tol_rel:
            converged = True
            break
        total = resid @ w
        if total <= 0:
            break  # all weighted residuals vanished; weights are degenerate
        w = w * resid
        w = w / w.sum()
    poly = ComplexPolynomial(_rescale_coefficients(best_coef, center, scale, n)) if n > 0 else ComplexPolynomial([1.0])
    return MinimaxSolution(
        polynomial=poly,
        sup_norm=float(np.abs(poly(points)).max()),
        weights=w,
        iterations=iterations,
        converged=converged,
        equioscillation_gap=float(gap),
        basis_center=center,
        basis_scale=scale,
        geo_mean_history=np.array(history) if history is not None else None,
    )


def chebyshev_on_points(
    points, n: int, opts: SolveOptions | None = None, initial_weights=None
) -> MinimaxSolution:
    """Discrete Chebyshev solve on an explicit point set (no resampling).

    ``initial_weights`` warm-starts the Lawson loop (e.g. with the weights
    of a previous solution); the default is the uniform distribution.
    """
    opts = opts or SolveOptions()
    points = np.asarray(points, dtype=complex)
    if len(points) <= n:
        raise RankDeficiencyError(f"need more than {n} points, got {len(points)}")
    return _lawson(points, n, opts, initial_weights=initial_weights)


def solve_chebyshev(
    sample: CurveSample, n: int, opts: SolveOptions | None = None
) -> MinimaxSolution:
    """Monic degree-n polynomial of least maximum modulus over the sample.

    Runs the Lawson loop on the sample; with ``opts.adapt`` the curve is
    resampled at twice the density until the discrete sup norm stabilizes
    (relative change below ``opts.adapt_tol``), so the discrete solution
    tracks the continuous curve problem.  A solution that exhausts
    ``max_iter`` is returned with ``converged=False``, never silently.
    """
    opts = opts or SolveOptions()
    sol = chebyshev_on_points(sample.points, n, opts)
    if not opts.adapt:
        return sol
    M = sample.size
    for _ in range(opts.max_refine):
        M *= 2
        finer = sample_level_curve(sample.family, sample.r, M)
        nxt = chebyshev_on_points(finer.points, n, opts)
        stable = abs(nxt.sup_norm - sol.sup_norm) < opts.adapt_tol * max(nxt.sup_norm, 1e-300)
        sol = nxt
        if stable:
            break
    return sol


def sup_norm_on_curve(
    p: ComplexPolynomial, f: CurveFamily, r: float, M_eval: int
) -> float:
    """Max modulus of p over a fresh M_eval-point sample of the level curve.

    A lower bound on the true supremum over the curve, converging as
    M_eval grows (spectrally for these analytic curves).
    """
    if M_eval < 8 * max(p.degree, 1):
        raise ValueError("evaluation sample too small: need M_eval >= 8*degree")
    pts = sample_level_curve(f, r, M_eval).points
    return float(np.abs(p(pts)).max())
