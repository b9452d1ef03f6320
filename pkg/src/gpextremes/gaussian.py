"""Gaussian path sampling on finite site grids.

Covariance matrices are wrapped in `CovMatrix` so that a Cholesky
factor, once computed, travels with the matrix and is never silently
recomputed with different jitter.  Sampling is a dense matrix product
against inverse-CDF normals; see `streams` for why not the ziggurat.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import FactorizationError, ParameterError
from .streams import Stream, standard_normals


@dataclass(frozen=True)
class JitterPolicy:
    """Escalating diagonal regularization for nearly singular targets.

    Attempt 0 factors the matrix as given; attempt j adds
    ``start * max|C| * growth**(j-1)`` to the diagonal.
    """

    start: float = 1e-12
    growth: float = 10.0
    max_tries: int = 6


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric positive semidefinite matrix over labelled sites.

    ``factor`` is the lower-triangular Cholesky factor of the (possibly
    jittered) matrix, or None before `cholesky_factor` has run.
    """

    sites: tuple
    values: np.ndarray
    factor: np.ndarray | None = None
    jitter_used: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ParameterError(f"covariance must be square, got shape {v.shape}")
        if len(self.sites) != v.shape[0]:
            raise ParameterError(
                f"{len(self.sites)} sites for a {v.shape[0]}x{v.shape[0]} matrix"
            )
        if not np.all(np.isfinite(v)):
            raise ParameterError("covariance entries must be finite")
        if not np.allclose(v, v.T, atol=1e-12 * max(1.0, np.abs(v).max())):
            raise ParameterError("covariance must be symmetric")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class PathBatch:
    """A stack of sampled paths: one row per path, one column per site."""

    sites: tuple
    paths: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.paths, dtype=float)
        if p.ndim != 2 or p.shape[1] != len(self.sites):
            raise ParameterError(
                f"paths shape {p.shape} does not match {len(self.sites)} sites"
            )
        object.__setattr__(self, "paths", p)


def fbm_cov(grid, alpha: float) -> CovMatrix:
    """Covariance of fractional Brownian motion on nonnegative times.

    Entries are ``(|t1|^a + |t2|^a - |t1-t2|^a) / 2``; the process is
    pinned to zero at time zero.

    Parameters
    ----------
    grid : sequence of float
        Evaluation times, all >= 0.
    alpha : float
        Increment-variance exponent, in (0, 2].
    """
    if not (0.0 < alpha <= 2.0):
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")
    t = np.asarray(list(grid), dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ParameterError("grid must be a nonempty 1-d sequence")
    if np.any(t < 0):
        raise ParameterError("fractional Brownian motion needs nonnegative times")
    ta = np.abs(t) ** alpha
    values = 0.5 * (ta[:, None] + ta[None, :] - np.abs(t[:, None] - t[None, :]) ** alpha)
    return CovMatrix(sites=tuple(t.tolist()), values=values)


def _first_bad_pivot(a: np.ndarray) -> tuple[float, int]:
    """Locate the first nonpositive pivot of an (unpivoted) Cholesky sweep."""
    a = a.copy()
    k = a.shape[0]
    for j in range(k):
        pivot = a[j, j]
        if pivot <= 0 or not np.isfinite(pivot):
            return float(pivot), j
        root = np.sqrt(pivot)
        a[j:, j] /= root
        # rank-1 downdate of the trailing block
        a[j + 1 :, j + 1 :] -= np.outer(a[j + 1 :, j], a[j + 1 :, j])
    return float("nan"), -1


def cholesky_factor(c: CovMatrix, policy: JitterPolicy = JitterPolicy()) -> CovMatrix:
    """Return a copy of ``c`` carrying its lower Cholesky factor.

    Coordinates whose variance is exactly zero (with a zero row, as in a
    field pinned at an anchor site) are structural: they get a zero row
    in the factor, no jitter.  The strictly positive part must then be
    positive definite; if it is not, it climbs the jitter ladder, and if
    the last rung still fails the error reports the offending pivot so
    the caller can see how indefinite the matrix actually was.
    """
    if c.factor is not None:
        return c
    v = c.values
    degenerate = np.diag(v) == 0.0
    if degenerate.any():
        bad = degenerate & (np.abs(v).max(axis=1) != 0.0)
        if bad.any():
            idx = int(np.nonzero(bad)[0][0])
            raise FactorizationError(
                f"zero variance at index {idx} with nonzero covariances",
                pivot=0.0,
                pivot_index=idx,
            )
        live = np.nonzero(~degenerate)[0]
        factor = np.zeros_like(v)
        if live.size:
            sub = CovMatrix(
                sites=tuple(c.sites[i] for i in live),
                values=v[np.ix_(live, live)],
            )
            sub = cholesky_factor(sub, policy)
            factor[np.ix_(live, live)] = sub.factor
            return replace(c, factor=factor, jitter_used=sub.jitter_used)
        return replace(c, factor=factor, jitter_used=0.0)
    scale = float(np.abs(v).max())
    jitters = [0.0] + [
        policy.start * max(scale, 1.0) * policy.growth**j for j in range(policy.max_tries)
    ]
    eye = np.eye(c.dim)
    for jit in jitters:
        try:
            factor = np.linalg.cholesky(v + jit * eye)
        except np.linalg.LinAlgError:
            continue
        return replace(c, factor=factor, jitter_used=jit)
    pivot, idx = _first_bad_pivot(v + jitters[-1] * eye)
    raise FactorizationError(
        f"not positive definite after {policy.max_tries} jitter attempts "
        f"(last jitter {jitters[-1]:.3e}, pivot {pivot:.3e} at index {idx})",
        pivot=pivot,
        pivot_index=idx,
    )


def sample_paths(c: CovMatrix, count: int, stream: Stream) -> PathBatch:
    """Draw ``count`` independent paths with covariance ``c``.

    The factor is computed on the fly (default jitter policy) when the
    caller has not already done so.
    """
    if count <= 0:
        raise ParameterError(f"count must be positive, got {count}")
    c = cholesky_factor(c)
    z = standard_normals(stream.generator(), (count, c.dim))
    return PathBatch(
        sites=c.sites,
        paths=z @ c.factor.T,
        provenance={"stream": stream.describe(), "jitter": c.jitter_used},
    )


def path_batch_to_csv(batch: PathBatch, digits: int = 17) -> str:
    """Serialize a batch: header row of site labels, one row per path."""
    buf = io.StringIO()
    buf.write(",".join(_site_label(s) for s in batch.sites) + "\n")
    fmt = f"%.{digits}g"
    for row in batch.paths:
        buf.write(",".join(fmt % x for x in row) + "\n")
    return buf.getvalue()


def _site_label(site) -> str:
    if isinstance(site, float):
        return repr(site)
    if isinstance(site, tuple):
        return "(" + " ".join(repr(float(x)) for x in site) + ")"
    return str(site)
