"""Randomized residual verification and growth-order estimation.

Identity testing here is numeric, not symbolic: a residual that vanishes
at a few hundred generic points of a polydisc is accepted as identically
zero for this class of holomorphic expressions, whose nonzero members
have thin zero sets.  Residuals are scaled pointwise by the equation's
own largest term, so cancellations between huge terms are judged
relative to those terms, never in absolute size.

The growth order of an entire candidate is estimated from the maximum
modulus over random directions at a geometric ladder of radii, fitting
the slope of log log M(r) against log r over the largest radii that
evaluate without overflow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .backends import eval_batch
from .elliptic import EllipticContext, default_context
from .errors import EstimationError, ProblemSpecError
from .expr import Expr, uses_wp
from .tape import compile_expr

__all__ = [
    "SamplingPolicy",
    "VerificationReport",
    "GrowthEstimate",
    "sample_points",
    "check_residual",
    "verify_problem",
    "estimate_order",
    "default_radii",
]


@dataclass(frozen=True)
class SamplingPolicy:
    """How to sample and when to accept: counts, radius, seed, tolerances."""

    samples: int = 200
    radius: float = 2.0
    seed: int = 42
    pole_eps: float = 1e-8
    tol: float = 1e-8

    def __post_init__(self):
        if self.samples < 1:
            raise ProblemSpecError(f"samples must be >= 1, got {self.samples}")
        if not (self.radius > 0):
            raise ProblemSpecError(f"radius must be positive, got {self.radius}")
        if not (self.tol > 0):
            raise ProblemSpecError(f"tol must be positive, got {self.tol}")

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "radius": self.radius,
            "seed": self.seed,
            "pole_eps": self.pole_eps,
            "tol": self.tol,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Residual statistics over the sample, with the policy echoed back."""

    n: int
    points_tested: int
    points_skipped: int
    max_abs_residual: float
    max_rel_residual: float
    passed: bool
    policy: SamplingPolicy

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "n": self.n,
            "points_tested": self.points_tested,
            "points_skipped": self.points_skipped,
            "max_abs_residual": self.max_abs_residual,
            "max_rel_residual": self.max_rel_residual,
            "policy": self.policy.to_dict(),
        }

    def to_text(self) -> str:
        lines = [
            f"verdict: {self.verdict}",
            f"points_tested: {self.points_tested}",
            f"points_skipped: {self.points_skipped}",
            f"max_abs_residual: {self.max_abs_residual!r}",
            f"max_rel_residual: {self.max_rel_residual!r}",
        ]
        for k, v in self.policy.to_dict().items():
            lines.append(f"policy.{k}: {v!r}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def sample_points(policy: SamplingPolicy, n: int) -> np.ndarray:
    """(samples, n) array; every coordinate uniform on the disc of the policy radius."""
    if n < 1:
        raise ProblemSpecError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(policy.seed)
    u = rng.random((policy.samples, n))
    theta = rng.random((policy.samples, n))
    return policy.radius * np.sqrt(u) * np.exp(2j * np.pi * theta)


def _needs_ell(exprs, ell):
    if ell is not None:
        return ell
    if any(uses_wp(e) for e in exprs):
        return default_context()
    return None


def check_residual(
    res: Expr,
    scale_terms: list[Expr],
    policy: SamplingPolicy,
    n: int,
    ell: EllipticContext | None = None,
    guards: list[tuple[Expr, float]] | None = None,
) -> VerificationReport:
    """Sample the residual and compare against max(1, largest scale term).

    Points where any expression pole-hits, evaluates non-finite, or where a
    guard expression has modulus below its floor are skipped (and counted);
    a verdict needs at least half the sample to survive.
    """
    ell = _needs_ell([res, *scale_terms] + [g for g, _ in (guards or [])], ell)
    pts = sample_points(policy, n)
    keep = np.ones(len(pts), dtype=bool)

    rvals, rok = eval_batch(res, pts, ell=ell, pole_eps=policy.pole_eps)
    keep &= rok & np.isfinite(rvals)

    scale = np.ones(len(pts))
    for term in scale_terms:
        tvals, tok = eval_batch(term, pts, ell=ell, pole_eps=policy.pole_eps)
        good = tok & np.isfinite(tvals)
        keep &= good
        scale = np.maximum(scale, np.where(good, np.abs(tvals), 1.0))

    for guard, floor in guards or []:
        gvals, gok = eval_batch(guard, pts, ell=ell, pole_eps=policy.pole_eps)
        keep &= gok & np.isfinite(gvals) & (np.abs(gvals) >= floor)

    tested = int(keep.sum())
    skipped = int(len(pts) - tested)
    if tested == 0:
        return VerificationReport(n, 0, skipped, float("inf"), float("inf"), False, policy)
    max_abs = float(np.abs(rvals[keep]).max())
    max_rel = float((np.abs(rvals[keep]) / scale[keep]).max())
    passed = bool(max_rel <= policy.tol and skipped < policy.samples / 2)
    return VerificationReport(n, tested, skipped, max_abs, max_rel, passed, policy)


def verify_problem(problem, f: Expr, policy: SamplingPolicy | None = None,
                   ell: EllipticContext | None = None,
                   guards: list[tuple[Expr, float]] | None = None) -> VerificationReport:
    """Convenience wrapper: residual + scale terms from an equation instance."""
    from .operators import residual, scale_terms as mk_scale

    policy = policy or SamplingPolicy()
    return check_residual(residual(problem, f), mk_scale(problem, f), policy, problem.n,
                          ell=ell, guards=guards)


# ---------------------------------------------------------------------------
# growth order


def default_radii() -> tuple[float, ...]:
    """Geometric ladder 4 .. 1024 with ratio sqrt(2)."""
    return tuple(float(4.0 * 2.0 ** (k / 2.0)) for k in range(17))


@dataclass(frozen=True)
class GrowthEstimate:
    """Max-modulus samples per radius and the fitted order exponent."""

    radii: tuple[float, ...]
    max_modulus: tuple[float, ...]
    rho_hat: float
    fit_radii: tuple[float, ...]
    ladder_truncated: bool
    directions: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "max_modulus": list(self.max_modulus),
            "rho_hat": self.rho_hat,
            "fit_radii": list(self.fit_radii),
            "ladder_truncated": self.ladder_truncated,
            "directions": self.directions,
            "seed": self.seed,
        }

    def to_text(self) -> str:
        lines = [f"rho_hat: {self.rho_hat!r}"]
        for r, m in zip(self.radii, self.max_modulus):
            lines.append(f"M({r:g}): {m!r}")
        lines.append(f"fit_radii: {', '.join('%g' % r for r in self.fit_radii)}")
        lines.append(f"ladder_truncated: {self.ladder_truncated}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def estimate_order(
    f: Expr,
    n: int,
    radii=None,
    directions: int = 200,
    seed: int = 42,
    ell: EllipticContext | None = None,
    fit_points: int = 2,
) -> GrowthEstimate:
    """Order exponent from the slope of log log M(r) against log r.

    One direction set is drawn on the unit sphere of C^n and rescaled to
    every radius, so M(r) is smooth in r and the top-of-ladder slope is
    stable.  Radii where the candidate overflows are dropped from the top
    (the usable prefix is reported); pole hits abort, since the estimator
    is only meaningful for candidates that are entire on the sample.
    """
    radii = tuple(float(r) for r in (radii if radii is not None else default_radii()))
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise EstimationError("need at least two strictly increasing radii")
    if directions < 1:
        raise EstimationError("need at least one direction")
    ell = _needs_ell([f], ell)
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((directions, n)) + 1j * rng.standard_normal((directions, n))
    norms = np.linalg.norm(vecs, axis=1)
    norms[norms == 0] = 1.0
    dirs = vecs / norms[:, None]

    tape = compile_expr(f)
    usable: list[float] = []
    max_mod: list[float] = []
    truncated = False
    for r in radii:
        vals, ok = eval_batch(tape, r * dirs, ell=ell, pole_eps=1e-12)
        if not ok.all():
            raise EstimationError(
                f"pole hit at radius {r:g}: order estimation expects entire candidates"
            )
        m = float(np.abs(vals).max())
        if not np.isfinite(m):
            truncated = True
            break
        usable.append(r)
        max_mod.append(m)
    if len(usable) < 2:
        raise EstimationError(
            f"overflow before two usable radii (usable prefix: {usable}); shrink the ladder"
        )

    fit_r = []
    fit_m = []
    for r, m in zip(reversed(usable), reversed(max_mod)):
        if m > 1.0:
            fit_r.append(r)
            fit_m.append(m)
        if len(fit_r) == max(2, fit_points):
            break
    if len(fit_r) < 2:
        raise EstimationError("max modulus never exceeded 1; cannot fit a growth order")
    x = np.log(np.asarray(fit_r))
    y = np.log(np.log(np.asarray(fit_m)))
    slope = float(np.polyfit(x, y, 1)[0])
    return GrowthEstimate(
        radii=tuple(usable),
        max_modulus=tuple(max_mod),
        rho_hat=slope,
        fit_radii=tuple(sorted(fit_r)),
        ladder_truncated=truncated,
        directions=directions,
        seed=seed,
    )
