"""Frame, Riesz and Bessel bounds plus perturbation and decomposition checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .linops import DEFAULT_TOL, Tolerances, VectorFamily, gram, orthonormal_range


@dataclass(frozen=True)
class SpectralReport:
    bessel_B: float
    frame_A: float
    riesz_lower: float
    riesz_upper: float
    sigma_min_synthesis: float
    unit_norm: bool
    rank: int

    @property
    def frame_ratio(self) -> float:
        """``bessel_B / frame_A``; inf for a family spanning nothing."""
        return self.bessel_B / self.frame_A if self.frame_A > 0 else float("inf")


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    entries: np.ndarray
    positions: tuple = None

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.dtype.kind not in "fc":
            e = e.astype(np.float64)
        if e.ndim != 1:
            raise InputError("coefficients must be a 1-D array")
        if not np.all(np.isfinite(e)):
            raise InputError("coefficients contain NaN or Inf")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        if self.positions is not None:
            pos = tuple(int(p) for p in self.positions)
            if len(pos) != e.size:
                raise InputError("positions and entries differ in length")
            object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.entries.size

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))


def synthesize(F: VectorFamily, c) -> np.ndarray:
    """``sum_i c_i f_i``."""
    c = c.entries if isinstance(c, CoefficientVector) else np.asarray(c)
    if c.shape != (len(F),):
        raise InputError(f"{c.shape[0] if c.ndim else 0} coefficients for {len(F)} vectors")
    return c @ F.vectors


def analysis_energy(F: VectorFamily, g) -> float:
    """``sum_i |<g, f_i>|^2``."""
    return float(np.sum(np.abs(F.vectors.conj() @ np.asarray(g)) ** 2))


def _singular_values(F: VectorFamily) -> np.ndarray:
    if len(F) == 0:
        return np.zeros(0)
    return np.linalg.svd(F.synthesis, compute_uv=False)


def _rank(s: np.ndarray, tol: Tolerances) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel_tol * s[0]))


def _sigma_min(F: VectorFamily, s: np.ndarray) -> float:
    # synthesis maps C^N -> C^dim; with N > dim it has a kernel
    if len(F) > F.dim or s.size == 0:
        return 0.0
    return float(s[-1])


def is_unit_norm(F: VectorFamily, tol: Tolerances = DEFAULT_TOL) -> bool:
    return bool(np.all(np.abs(F.norms() - 1.0) <= tol.report_tol))


def spectral_report(F: VectorFamily, tol: Tolerances = DEFAULT_TOL) -> SpectralReport:
    if len(F) == 0:
        raise InputError("spectral_report needs a nonempty family")
    s = _singular_values(F)
    rank = _rank(s, tol)
    w = np.linalg.eigvalsh(gram(F))
    upper = float(max(w[-1], 0.0))
    lower = float(max(w[0], 0.0)) if rank == len(F) else 0.0
    frame_a = float(s[rank - 1] ** 2) if rank else 0.0
    return SpectralReport(
        bessel_B=upper,
        frame_A=min(frame_a, upper),
        riesz_lower=lower,
        riesz_upper=upper,
        sigma_min_synthesis=_sigma_min(F, s),
        unit_norm=is_unit_norm(F, tol),
        rank=rank,
    )


def is_linearly_independent(F: VectorFamily, tol: Tolerances = DEFAULT_TOL):
    """``(independent, sigma_min of the synthesis map)``."""
    s = _singular_values(F)
    return _rank(s, tol) == len(F), _sigma_min(F, s)


def omega_independence_margin(F: VectorFamily, tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest singular value of the synthesis map.

    For a finite family the only null combinations are ordinary linear
    dependencies, so a margin above the rank cutoff certifies that
    ``sum c_i f_i = 0`` forces ``c = 0``.
    """
    return is_linearly_independent(F, tol)[1]


def span_residual(F: VectorFamily, G: VectorFamily, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest ``||g - P_F g||`` over members of ``G``."""
    if F.dim != G.dim:
        raise InputError(f"dimension mismatch: {F.dim} vs {G.dim}")
    if len(G) == 0:
        return 0.0
    P = orthonormal_range(F, F.labels, tol)
    resid = G.vectors - P.apply(G.vectors)
    return float(np.max(np.linalg.norm(resid, axis=1)))


def perturbation_distance(F: VectorFamily, G: VectorFamily, tol: Tolerances = DEFAULT_TOL):
    """``(sum ||f_i - g_i||^2, every g_i lies in span F)``."""
    if len(F) != len(G) or F.dim != G.dim:
        raise InputError(
            f"families differ in shape: {len(F)}x{F.dim} vs {len(G)}x{G.dim}")
    diff = F.vectors - G.vectors
    energy = float(np.sum(np.abs(diff) ** 2))
    return energy, span_residual(F, G, tol) <= tol.ortho_tol


def check_partition(labels: Sequence, blocks: Iterable[Iterable]) -> list:
    blocks = [tuple(int(x) for x in b) for b in blocks]
    seen = [x for b in blocks for x in b]
    if len(seen) != len(set(seen)):
        raise InputError("blocks overlap")
    if set(seen) != set(labels):
        missing = sorted(set(labels) - set(seen))
        extra = sorted(set(seen) - set(labels))
        raise InputError(f"blocks do not partition the labels (missing {missing}, unknown {extra})")
    return blocks


def cross_coherence(G: VectorFamily, blocks) -> tuple:
    """Largest ``|<g_i, g_j>|`` across distinct blocks and the block pair attaining it."""
    blocks = check_partition(G.labels, blocks)
    n = len(G)
    owner = np.empty(n, dtype=np.int64)
    for b, members in enumerate(blocks):
        for lab in members:
            owner[G.position(lab)] = b
    if n == 0:
        return 0.0, None
    mag = np.abs(gram(G))
    mask = owner[:, None] != owner[None, :]
    if not mask.any():
        return 0.0, None
    masked = np.where(mask, mag, -1.0)
    i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
    bi, bj = sorted((int(owner[i]), int(owner[j])))
    return float(mag[i, j]), (bi, bj)


def verify_orthogonal_decomposition(G: VectorFamily, blocks, tol: Tolerances = DEFAULT_TOL):
    """``(ok, max cross-block |<g_i, g_j>|)``; ``blocks`` partition the labels of ``G``."""
    worst, _ = cross_coherence(G, blocks)
    return worst <= tol.ortho_tol, worst


def frame_inequality_samples(F: VectorFamily, n_samples: int, seed: int) -> np.ndarray:
    """``sum_i |<g, f_i>|^2`` for seeded random unit vectors ``g`` in ``span F``."""
    rng = np.random.default_rng(seed)
    P = orthonormal_range(F, F.labels)
    coords = rng.standard_normal((n_samples, P.rank))
    if F.scalars == "complex":
        coords = coords + 1j * rng.standard_normal((n_samples, P.rank))
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    g = coords @ P.basis.T
    return np.sum(np.abs(g @ F.vectors.conj().T) ** 2, axis=1)


def riesz_inequality_samples(F: VectorFamily, n_samples: int, seed: int):
    """``(||c||^2, ||sum c_i f_i||^2)`` for seeded random coefficient vectors."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((n_samples, len(F)))
    if F.scalars == "complex":
        c = c + 1j * rng.standard_normal((n_samples, len(F)))
    return (np.sum(np.abs(c) ** 2, axis=1),
            np.sum(np.abs(c @ F.vectors) ** 2, axis=1))
