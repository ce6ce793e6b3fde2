"""Monte Carlo checks of genericity: how rarely random data violates decay.

Four suites back the claim that poorly-transversal configurations are
exceptional:

* ``mc_bad_set_measure`` bounds the ball measure of points within
  eps * j^-2 of at least one member of a hyperplane family;
* ``mc_det_lower_bound`` studies |det(A + A_j)| for random coefficient
  matrices A, checking the measure of near-singular shifts is linear in
  the slab height and that eps_hat = min_j j^2 |det(A + A_j)| is positive;
* ``inverse_bound_check`` turns determinant floors into smallest-singular-
  value floors via sigma_min * ||inverse||_2 = 1;
* ``translation_experiment`` perturbs a certified complement by random
  coefficient matrices plus a fixed translation and measures how often the
  resulting span still separates with a polynomial floor.

Sampling uses counter-based RNG keyed by the master seed, so results are
deterministic and every sample's randomness is addressable by its index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import SpanSubspace, ValidationError, orthonormalize
from .separator import (
    ComplementResult,
    SeparationCertificate,
    SubspaceFamily,
    certify,
    is_well_separating,
)

def translation_decay_ceiling(codim: int) -> float:
    """Default decay-exponent ceiling for translated spans: 5 k^2 + 2."""
    return 5.0 * codim ** 2 + 2.0


def ball_volume(dim: int) -> float:
    """Lebesgue volume of the unit ball in R^dim (1 for dim = 0)."""
    if dim < 0:
        raise ValidationError("dimension must be nonnegative")
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


@dataclass(frozen=True)
class McConfig:
    """Shared Monte Carlo knobs.

    ``epsilon_grid`` doubles as the eta-grid of the determinant suite and
    must be strictly decreasing.  ``horizon`` is the number of family
    members or shift matrices J when the suite generates its own.
    """

    samples: int = 10_000
    seed: int = 0
    epsilon_grid: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    horizon: int = 50

    def __post_init__(self):
        if self.samples < 1000:
            raise ValidationError("samples must be at least 1000")
        grid = tuple(float(e) for e in self.epsilon_grid)
        if not grid or any(e <= 0 for e in grid):
            raise ValidationError("epsilon_grid entries must be positive")
        if any(a <= b for a, b in zip(grid, grid[1:])):
            raise ValidationError("epsilon_grid must be strictly decreasing")
        if self.horizon < 1:
            raise ValidationError("horizon must be at least 1")
        object.__setattr__(self, "epsilon_grid", grid)


@dataclass(frozen=True)
class McReport:
    """Outcome of one Monte Carlo suite.

    When ``analytic_bound`` is present the verdict passes iff
    estimate <= bound + 3 * stderr; bound-free suites put their pass
    condition in ``metadata['criterion']``.
    """

    estimate: float
    stderr: float
    analytic_bound: float | None
    verdict: bool
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.analytic_bound is not None:
            expected = self.estimate <= self.analytic_bound + 3.0 * self.stderr
            if self.verdict != expected:
                raise ValidationError("verdict contradicts the bound comparison")

    def to_dict(self) -> dict:
        return {
            "estimate": float(self.estimate),
            "stderr": float(self.stderr),
            "analytic_bound": None if self.analytic_bound is None
            else float(self.analytic_bound),
            "verdict": bool(self.verdict),
            "metadata": _plain(self.metadata),
        }


def _plain(obj):
    """Recursively convert numpy scalars/arrays for JSON serialization."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    return obj


def _keyed_rng(seed: int, *index: int) -> np.random.Generator:
    """Deterministic stream derived from (master seed, index...)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(index)))


def sample_ball(rng: np.random.Generator, count: int, dim: int,
                radius: float = 1.0) -> np.ndarray:
    """Uniform points in the ball of the given radius: Gaussian direction
    times radius * U^(1/dim) scaling."""
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    r = radius * rng.random((count, 1)) ** (1.0 / dim)
    return g * (r / norms)


def mc_bad_set_measure(family: SubspaceFamily, epsilon: float,
                       config: McConfig) -> McReport:
    """Ball measure of points within epsilon * j^-2 of some member hyperplane.

    Requires codim 1 and n >= 2.  The analytic bound is
    epsilon * (pi^2 / 3) * vol(B^{n-1}); the truncated sum over the J
    observed members is reported in the metadata and is always smaller.
    """
    if family.codim != 1:
        raise ValidationError("bad-set suite requires a codimension-1 family")
    n = family.ambient_dim
    if n < 2:
        raise ValidationError("need ambient dimension at least 2")
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    J = len(family)
    normals = np.vstack([m.normals[0] for m in family])
    j = np.arange(1, J + 1, dtype=float)
    thresholds = epsilon * j ** -2.0

    rng = _keyed_rng(config.seed)
    x = sample_ball(rng, config.samples, n)
    hits = np.abs(x @ normals.T) <= thresholds
    bad = np.any(hits, axis=1)
    count = int(np.count_nonzero(bad))
    p = count / config.samples
    vol = ball_volume(n)
    estimate = vol * p
    stderr = vol * math.sqrt(p * (1.0 - p) / config.samples)
    shell = ball_volume(n - 1)
    bound = epsilon * (math.pi ** 2 / 3.0) * shell
    truncated = 2.0 * epsilon * float(np.sum(j ** -2.0)) * shell
    # multiplicity-counted slab sum: the subadditive majorant of the union,
    # exactly linear in epsilon until individual slabs saturate the ball
    sum_estimate = vol * float(np.mean(np.count_nonzero(hits, axis=1)))
    verdict = estimate <= bound + 3.0 * stderr
    return McReport(estimate, stderr, bound, verdict, metadata={
        "suite": "badset",
        "samples": config.samples,
        "seed": config.seed,
        "epsilon": float(epsilon),
        "ambient_dim": n,
        "members": J,
        "truncated_bound": truncated,
        "bad_count": count,
        "ball_volume": vol,
        "sum_estimate": sum_estimate,
        "bound_vacuous": bound >= vol,
    })


def det_slab_coefficient(A_tilde: np.ndarray, eta_grid, samples: int,
                         seed: int):
    """Estimate mu({A : |det(A + A_tilde)| <= eta}) over an eta-grid and fit
    the through-origin slope c_hat.

    A has columns uniform in the unit ball of R^k, so mu lives on a domain
    of volume vol(B^k)^k.  Returns (c_hat, r_squared, mu_estimates).
    """
    A_tilde = np.asarray(A_tilde, dtype=float)
    if A_tilde.ndim != 2 or A_tilde.shape[0] != A_tilde.shape[1]:
        raise ValidationError("shift matrix must be square")
    k = A_tilde.shape[0]
    etas = np.asarray(sorted(float(e) for e in eta_grid), dtype=float)
    if etas.size < 2 or np.any(etas <= 0):
        raise ValidationError("need at least two positive eta values")
    rng = _keyed_rng(seed)
    cols = sample_ball(rng, samples * k, k)
    A = cols.reshape(samples, k, k).transpose(0, 2, 1)  # columns are ball points
    dets = np.abs(np.linalg.det(A + A_tilde))
    domain_vol = ball_volume(k) ** k
    mu = np.array([domain_vol * np.count_nonzero(dets <= e) / samples
                   for e in etas])
    c_hat = float(np.sum(mu * etas) / np.sum(etas ** 2))
    residuals = mu - c_hat * etas
    ss_tot = float(np.sum((mu - mu.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residuals ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return c_hat, r_squared, mu


def mc_det_lower_bound(A_list, config: McConfig):
    """Determinant floors for randomly shifted coefficient matrices.

    (a) fits the slab coefficient c_hat of mu({|det(A + A_1)| <= eta}) on
    ``config.epsilon_grid`` (the first shift acts as the fixed reference);
    (b) reports eps_hat = min_j j^2 |det(A + A_j)| per sample and the
    fraction of samples with eps_hat > 0, which should be 1 up to
    measure-zero ties.

    Returns (McReport, per-sample eps_hat array); the verdict requires the
    linear fit to have r^2 >= 0.99 and the positive fraction >= 0.99.
    """
    A_arr = np.asarray(A_list, dtype=float)
    if A_arr.ndim != 3 or A_arr.shape[1] != A_arr.shape[2]:
        raise ValidationError("A_list must be a stack of square matrices")
    J, k, _ = A_arr.shape
    c_hat, r_squared, mu = det_slab_coefficient(
        A_arr[0], config.epsilon_grid, config.samples, config.seed)

    rng = _keyed_rng(config.seed, 1)
    cols = sample_ball(rng, config.samples * k, k)
    A = cols.reshape(config.samples, k, k).transpose(0, 2, 1)
    j = np.arange(1, J + 1, dtype=float)
    scaled = np.empty((config.samples, J))
    for idx in range(J):
        scaled[:, idx] = (idx + 1.0) ** 2 * np.abs(np.linalg.det(A + A_arr[idx]))
    eps_hat = scaled.min(axis=1)

    frac = float(np.count_nonzero(eps_hat > 0)) / config.samples
    stderr = math.sqrt(frac * (1.0 - frac) / config.samples)
    verdict = (r_squared >= 0.99) and (frac >= 0.99)
    report = McReport(frac, stderr, None, verdict, metadata={
        "suite": "det",
        "criterion": "r_squared >= 0.99 and positive_fraction >= 0.99",
        "samples": config.samples,
        "seed": config.seed,
        "k": k,
        "members": J,
        "c_hat": c_hat,
        "r_squared": r_squared,
        "eta_grid": sorted(config.epsilon_grid),
        "mu_estimates": mu,
        "eps_hat_min": float(eps_hat.min()),
        "eps_hat_median": float(np.median(eps_hat)),
    })
    return report, eps_hat


def inverse_bound_check(A, A_list, delta_list):
    """Per-index sigma_min floors for shifted matrices.

    Preconditions: delta_j in (0, 1] and ||A_j||_2 <= 1 / delta_j.  Returns
    (s, eps_hat) with s_j = sigma_min(A + A_j) and
    eps_hat = min_j s_j * j^2 * delta_j^-(k-1), the largest eps consistent
    with the floor s_j >= eps * j^-2 * delta_j^(k-1).
    """
    A = np.asarray(A, dtype=float)
    A_arr = np.asarray(A_list, dtype=float)
    delta = np.asarray(delta_list, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("A must be square")
    k = A.shape[0]
    if A_arr.ndim != 3 or A_arr.shape[1:] != (k, k):
        raise ValidationError("A_list must be a stack of k x k matrices")
    J = A_arr.shape[0]
    if delta.shape != (J,):
        raise ValidationError("delta_list length must match A_list")
    if np.any(delta <= 0) or np.any(delta > 1):
        raise ValidationError("deltas must lie in (0, 1]")
    norms = np.linalg.norm(A_arr, ord=2, axis=(1, 2))
    if np.any(norms > 1.0 / delta + 1e-9):
        bad = int(np.argmax(norms * delta)) + 1
        raise ValidationError(
            f"shift {bad} has spectral norm {norms[bad - 1]:.6g} "
            f"exceeding 1/delta = {1.0 / delta[bad - 1]:.6g}"
        )
    svals = np.linalg.svd(A[None, :, :] + A_arr, compute_uv=False)
    s = svals[:, -1]
    j = np.arange(1, J + 1, dtype=float)
    eps_hat = float(np.min(s * j ** 2 * delta ** -(k - 1)))
    return s, eps_hat


def mc_inverse_bound(A_list, delta_list, config: McConfig):
    """Sample A (columns uniform in the unit ball) and check eps_hat > 0.

    Returns (McReport, per-sample eps_hat array).
    """
    A_arr = np.asarray(A_list, dtype=float)
    delta = np.asarray(delta_list, dtype=float)
    if A_arr.ndim != 3 or A_arr.shape[1] != A_arr.shape[2]:
        raise ValidationError("A_list must be a stack of square matrices")
    J, k, _ = A_arr.shape
    rng = _keyed_rng(config.seed)
    cols = sample_ball(rng, config.samples * k, k)
    A = cols.reshape(config.samples, k, k).transpose(0, 2, 1)
    shifted = A[:, None, :, :] + A_arr[None, :, :, :]
    svals = np.linalg.svd(shifted, compute_uv=False)
    s_min = svals[..., -1]
    j = np.arange(1, J + 1, dtype=float)
    eps_hat = (s_min * j ** 2 * delta ** -(k - 1)).min(axis=1)
    frac = float(np.count_nonzero(eps_hat > 0)) / config.samples
    stderr = math.sqrt(frac * (1.0 - frac) / config.samples)
    report = McReport(frac, stderr, None, frac >= 0.99, metadata={
        "suite": "inverse",
        "criterion": "positive_fraction >= 0.99",
        "samples": config.samples,
        "seed": config.seed,
        "k": k,
        "members": J,
        "eps_hat_min": float(eps_hat.min()),
        "eps_hat_median": float(np.median(eps_hat)),
    })
    return report, eps_hat


def translated_span(basis: np.ndarray, coeff: np.ndarray,
                    translation: np.ndarray) -> SpanSubspace:
    """Span of c_i + x_i where c_i = sum_l coeff[l, i] * basis row l.

    With coeff = identity and zero translation this reproduces the input
    frame bit-for-bit (orthonormalization passes already-orthonormal input
    through unchanged).
    """
    rows = np.asarray(coeff, dtype=float).T @ np.asarray(basis, dtype=float)
    rows = rows + np.asarray(translation, dtype=float)
    frame = orthonormalize(rows)
    if frame.size < rows.shape[0]:
        raise ValidationError("translated tuple is linearly dependent")
    return SpanSubspace.from_frame(frame)


def translation_experiment(base: ComplementResult, family: SubspaceFamily,
                           translation, config: McConfig,
                           radius: float = 1.0,
                           max_exponent: float | None = None,
                           target: float = 0.99):
    """How often random coefficient perturbations of a certified complement,
    shifted by a fixed translation, still separate with a polynomial floor.

    For each sample a coefficient matrix A with columns uniform in the ball
    of the given radius is drawn from a stream keyed by (seed, sample), the
    span of the translated combinations is certified against the family,
    and is_well_separating is evaluated at ``max_exponent`` (default
    5 k^2 + 2).  Families with fewer than three members fall back to
    requiring strictly positive measured deltas.

    Returns (McReport, list of per-sample measured certificates or None
    for degenerate draws).
    """
    k = family.codim
    n = family.ambient_dim
    X = np.atleast_2d(np.asarray(translation, dtype=float))
    if X.shape != (k, n):
        raise ValidationError(f"translation must be {k} vectors in R^{n}")
    if base.complement.ambient_dim != n or base.complement.dim != k:
        raise ValidationError("base complement does not match the family")
    if not base.certificate.positive:
        raise ValidationError("base is not a certified complement of the family")
    if not radius > 0:
        raise ValidationError("radius must be positive")
    if max_exponent is None:
        max_exponent = translation_decay_ceiling(k)

    basis = base.complement.basis
    passing = 0
    exponents: list[float] = []
    certs: list[SeparationCertificate | None] = []
    for i in range(config.samples):
        rng = _keyed_rng(config.seed, i)
        A = sample_ball(rng, k, k, radius).T  # columns uniform in the ball
        try:
            span = translated_span(basis, A, X)
        except ValidationError:
            certs.append(None)
            continue
        cert = certify(span, family)
        certs.append(cert)
        if not cert.positive:
            continue
        if len(family) >= 3:
            ok = is_well_separating(cert, max_exponent)
        else:
            ok = True
        if ok:
            passing += 1
            exponents.append(-cert.decay_fit.exponent)
    frac = passing / config.samples
    stderr = math.sqrt(frac * (1.0 - frac) / config.samples)
    exp_max = max(exponents) if exponents else float("nan")
    exp_median = float(np.median(exponents)) if exponents else float("nan")
    report = McReport(frac, stderr, None, frac >= target, metadata={
        "suite": "translation",
        "criterion": f"passing_fraction >= {target}",
        "samples": config.samples,
        "seed": config.seed,
        "k": k,
        "ambient_dim": n,
        "members": len(family),
        "radius": float(radius),
        "max_exponent": float(max_exponent),
        "exponent_max": exp_max,
        "exponent_median": exp_median,
    })
    return report, certs


__all__ = [
    "translation_decay_ceiling",
    "ball_volume",
    "McConfig",
    "McReport",
    "sample_ball",
    "mc_bad_set_measure",
    "det_slab_coefficient",
    "mc_det_lower_bound",
    "inverse_bound_check",
    "mc_inverse_bound",
    "translated_span",
    "translation_experiment",
]
