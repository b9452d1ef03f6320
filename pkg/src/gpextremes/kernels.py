"""Negative-definite kernels, possibly taking the value +infinity.

A kernel value Gamma(t1, t2) plays the role of an incremental variance
Var(W(t1) - W(t2)).  Infinite entries mean "no jointly Gaussian pair
exists"; finiteness must then be an equivalence relation on the grid,
and all constructions act blockwise on its classes.

Infinity is represented by ``math.inf`` / ``np.inf`` throughout, which
every arithmetic path here (exp, comparisons, masking) handles without
special cases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BlockError, ConfigError, DomainError, ParameterError, StructureError
from .gaussian import CovMatrix


@dataclass(frozen=True)
class FbmIncrement:
    """Gamma(t1, t2) = |t1 - t2|**alpha on the real line, alpha in (0, 2]."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")


@dataclass(frozen=True)
class SphereGeodesic:
    """Gamma(x, y) = rho(x, y)**beta for unit vectors on the 2-sphere.

    ``rho`` is the great-circle distance.  beta is restricted to the
    open interval (0, 1); the endpoint beta = 1 is excluded here because
    its membership in the valid family is not settled.
    """

    beta: float

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")


@dataclass(frozen=True)
class CustomMatrix:
    """Explicit kernel table over a fixed finite site set."""

    sites: tuple
    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] != len(self.sites):
            raise ParameterError(
                f"gamma shape {g.shape} does not match {len(self.sites)} sites"
            )
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "sites", tuple(self.sites))

    def index_of(self, site) -> int:
        try:
            return self.sites.index(site)
        except ValueError:
            raise DomainError(f"site {site!r} is not in the custom kernel table") from None


@dataclass(frozen=True)
class Scaled:
    """A base kernel multiplied by a nonnegative constant."""

    base: "KernelSpec"
    factor: float

    def __post_init__(self):
        if not (self.factor >= 0.0) or not math.isfinite(self.factor):
            raise ParameterError(f"scale factor must be finite and >= 0, got {self.factor}")


KernelSpec = Union[FbmIncrement, SphereGeodesic, CustomMatrix, Scaled]


def eval_gamma(spec: KernelSpec, t1, t2) -> float:
    """Evaluate a kernel at a pair of sites.  May return +inf."""
    if isinstance(spec, FbmIncrement):
        return abs(float(t1) - float(t2)) ** spec.alpha
    if isinstance(spec, SphereGeodesic):
        return _geodesic(t1, t2) ** spec.beta
    if isinstance(spec, CustomMatrix):
        return float(spec.gamma[spec.index_of(t1), spec.index_of(t2)])
    if isinstance(spec, Scaled):
        return spec.factor * eval_gamma(spec.base, t1, t2)
    raise ParameterError(f"unknown kernel spec {type(spec).__name__}")


def _geodesic(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for v in (x, y):
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-8:
            raise DomainError(f"sphere sites must be unit 3-vectors, got {v!r}")
    return float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)))


@dataclass(frozen=True)
class GammaMatrix:
    """A kernel evaluated on a grid, with its finiteness partition.

    Construction validates symmetry, a zero diagonal, nonnegativity and
    that finiteness is transitive across the grid, so every instance in
    circulation has a sound block structure.
    """

    sites: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] != len(self.sites):
            raise StructureError(f"values shape {v.shape} for {len(self.sites)} sites")
        if np.any(np.isnan(v)):
            raise StructureError("kernel matrix contains NaN")
        if not np.array_equal(v, v.T):
            raise StructureError("kernel matrix must be symmetric")
        if np.any(np.diag(v) != 0.0):
            raise StructureError("kernel diagonal must be exactly zero")
        if np.any(v < 0):
            raise StructureError("kernel values must be nonnegative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "_blocks", _finite_blocks(v))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def block_of(self, index: int) -> tuple[int, ...]:
        for b in self._blocks:
            if index in b:
                return b
        raise ParameterError(f"index {index} out of range")


def _finite_blocks(v: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Connected components of the finiteness graph, checked transitive."""
    k = v.shape[0]
    finite = np.isfinite(v)
    seen = np.zeros(k, dtype=bool)
    blocks = []
    for start in range(k):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.nonzero(finite[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comp.sort()
        ix = np.array(comp)
        if not finite[np.ix_(ix, ix)].all():
            raise StructureError(
                "finiteness is not transitive: sites "
                f"{comp} are chained through finite entries but contain an infinite pair"
            )
        blocks.append(tuple(comp))
    return tuple(blocks)


def gamma_matrix(spec: KernelSpec, grid) -> GammaMatrix:
    """Tabulate a kernel on a grid of sites."""
    sites = tuple(grid)
    if len(sites) == 0:
        raise ParameterError("grid must be nonempty")
    k = len(sites)
    v = np.empty((k, k))
    for i in range(k):
        v[i, i] = 0.0
        for j in range(i + 1, k):
            v[i, j] = v[j, i] = eval_gamma(spec, sites[i], sites[j])
    return GammaMatrix(sites=sites, values=v)


def decompose_extended(g: GammaMatrix) -> tuple[tuple[int, ...], ...]:
    """Partition of site indices into maximal mutually-finite blocks."""
    return g._blocks


@dataclass(frozen=True)
class BlockReport:
    indices: tuple[int, ...]
    max_eigenvalue: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    blocks: tuple[BlockReport, ...]
    tol: float
    passed: bool

    @property
    def worst(self) -> float:
        return max(b.max_eigenvalue for b in self.blocks)


def validate_negative_definite(g: GammaMatrix, tol: float | None = None) -> ValidationReport:
    """Check the zero-sum quadratic form of each finite block.

    A kernel is accepted when, for every block B, the projection of B
    onto the zero-sum subspace has no eigenvalue above ``tol``.  The
    default tolerance is 1e-8 times the max-norm of the finite entries,
    so exact kernels pass despite roundoff while genuine violations
    (which grow with the matrix scale) fail.
    """
    if tol is None:
        finite = g.values[np.isfinite(g.values)]
        tol = 1e-8 * float(np.abs(finite).max()) if finite.size else 0.0
    reports = []
    for block in decompose_extended(g):
        ix = np.array(block)
        b = g.values[np.ix_(ix, ix)]
        k = len(block)
        if k == 1:
            reports.append(BlockReport(block, 0.0, True))
            continue
        p = np.eye(k) - np.full((k, k), 1.0 / k)
        m = p @ b @ p
        top = float(np.linalg.eigvalsh(0.5 * (m + m.T)).max())
        reports.append(BlockReport(block, top, top <= tol))
    return ValidationReport(tuple(reports), float(tol), all(r.passed for r in reports))


def ws_covariance(g: GammaMatrix, anchor: int, indices=None) -> CovMatrix:
    """Covariance of the Gaussian process with incremental variance ``g``
    pinned to zero at the anchor site.

    ``C[i, j] = (Gamma(i, s) + Gamma(j, s) - Gamma(i, j)) / 2`` with
    ``s`` the anchor; the anchor row and column vanish, and the diagonal
    recovers ``Gamma(i, s)``.
    """
    if not (0 <= anchor < g.dim):
        raise ParameterError(f"anchor index {anchor} out of range")
    block = set(g.block_of(anchor))
    if indices is None:
        indices = tuple(range(g.dim))
    indices = tuple(int(i) for i in indices)
    outside = [i for i in indices if i not in block]
    if outside:
        raise BlockError(
            f"sites {outside} are not in the finiteness block of anchor {anchor}; "
            "no common Gaussian representation exists"
        )
    ix = np.array(indices)
    gs = g.values[ix, anchor]
    c = 0.5 * (gs[:, None] + gs[None, :] - g.values[np.ix_(ix, ix)])
    return CovMatrix(sites=tuple(g.sites[i] for i in indices), values=c)


def schoenberg_cov(g: GammaMatrix, n) -> CovMatrix:
    """Pre-limit covariance family for maxima: ``exp(-Gamma / (4 log n))``.

    Unit variances; infinite kernel entries map to exactly zero
    correlation.  ``n`` is the copy count and must exceed 1 (noninteger
    values are accepted so the formula can be pinned at exact points).
    """
    n = float(n)
    if not n > 1.0:
        raise ParameterError(f"copy count must exceed 1, got {n}")
    with np.errstate(over="ignore"):
        r = np.exp(-g.values / (4.0 * math.log(n)))
    return CovMatrix(sites=g.sites, values=r)


def schoenberg_cov_min(g: GammaMatrix, n) -> CovMatrix:
    """Pre-limit covariance family for minima: ``exp(-pi Gamma / n^2)``.

    Scaled so that ``(1/pi) n^2 (1 - r_n)`` recovers Gamma, the rate at
    which small-ball dependence enters the minima limit.
    """
    n = float(n)
    if not n > 1.0:
        raise ParameterError(f"copy count must exceed 1, got {n}")
    r = np.exp(-math.pi * g.values / n**2)
    return CovMatrix(sites=g.sites, values=r)


def restrict(g: GammaMatrix, indices) -> GammaMatrix:
    """Sub-matrix of ``g`` on a subset of site indices."""
    ix = np.array([int(i) for i in indices])
    return GammaMatrix(
        sites=tuple(g.sites[i] for i in ix),
        values=g.values[np.ix_(ix, ix)],
    )


def kernel_from_config(obj: dict | str) -> KernelSpec:
    """Build a kernel spec from its JSON form.

    Accepted shapes::

        {"type": "fbm", "alpha": 0.5}
        {"type": "sphere", "beta": 0.5}
        {"type": "custom", "sites": [...], "gamma": [[...]]}   # "inf" allowed
        {"type": "scaled", "factor": 2.0, "base": {...}}
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise ConfigError([f"kernel config is not valid JSON: {e}"]) from None
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError(["kernel config must be a dict with a 'type' key"])
    kind = obj["type"]
    try:
        if kind == "fbm":
            return FbmIncrement(alpha=float(obj["alpha"]))
        if kind == "sphere":
            return SphereGeodesic(beta=float(obj["beta"]))
        if kind == "custom":
            gamma = [[_parse_entry(x) for x in row] for row in obj["gamma"]]
            sites = [tuple(s) if isinstance(s, list) else s for s in obj["sites"]]
            return CustomMatrix(sites=tuple(sites), gamma=np.array(gamma))
        if kind == "scaled":
            return Scaled(base=kernel_from_config(obj["base"]), factor=float(obj["factor"]))
    except KeyError as e:
        raise ConfigError([f"kernel config for type {kind!r} is missing key {e}"]) from None
    raise ConfigError([f"unknown kernel type {kind!r}"])


def _parse_entry(x) -> float:
    if isinstance(x, str):
        if x.lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ParameterError(f"kernel entries must be numbers or 'inf', got {x!r}")
    return float(x)
