"""Example families: the shift-pair sequence, its dyadic reordering, unions of
orthonormal bases and seeded random Bessel families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError, PreconditionError
from .frames import CoefficientVector
from .linops import VectorFamily

KINDS = ("shift_pair", "dyadic_reorder", "union_onb", "random_bessel")
RANDOM_KINDS = ("union_onb", "random_bessel")


def _positive_int(name, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise InputError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def gen_shift_pair(n: int) -> VectorFamily:
    """``f_i = (e_i + e_{i+1}) / sqrt(2)`` for ``i = 1..n`` in dimension ``n + 1``."""
    n = _positive_int("n", n)
    v = np.zeros((n, n + 1))
    idx = np.arange(n)
    v[idx, idx] = v[idx, idx + 1] = 1.0 / math.sqrt(2.0)
    return VectorFamily(n + 1, v)


def dyadic_reorder_permutation(n: int) -> tuple:
    """1-based original indices in reordered position order.

    Each dyadic block ``2^k .. 2^{k+1}-1`` is rotated left by one, so its
    first member moves to the end.  A trailing incomplete block is rotated
    the same way.
    """
    n = _positive_int("n", n)
    out = []
    lo = 1
    while lo <= n:
        hi = min(2 * lo - 1, n)
        block = list(range(lo, hi + 1))
        out.extend(block[1:] + block[:1])
        lo *= 2
    return tuple(out)


def gen_dyadic_reorder(n: int) -> VectorFamily:
    """Shift-pair family in dyadic-rotated order; labels keep the original indices."""
    base = gen_shift_pair(n)
    return base.permuted([i - 1 for i in dyadic_reorder_permutation(n)])


def dyadic_level(k: int) -> range:
    """1-based positions ``2^{2k} .. 2^{2k+1}-1``."""
    k = _positive_int("k", k, 0)
    return range(2 ** (2 * k), 2 ** (2 * k + 1))


def dyadic_part(n: int, odd: bool = False) -> list:
    """Positions ``<= n`` in the even (``I_1``) or odd (``I_2``) dyadic levels."""
    n = _positive_int("n", n)
    out, e = [], 1 if odd else 0
    while 2 ** e <= n:
        out.extend(p for p in range(2 ** e, 2 ** (e + 1)) if p <= n)
        e += 2
    return out


def alternating_coefficients(k: int) -> CoefficientVector:
    """``(-1)^i / 2^k`` on positions ``2^{2k} + i``, ``i = 0..4^k - 1``; unit norm."""
    pos = dyadic_level(k)
    size = len(pos)
    entries = np.array([(-1.0) ** i for i in range(size)]) / math.sqrt(size)
    return CoefficientVector(entries, tuple(pos))


def _random_onb(rng: np.random.Generator, d: int) -> np.ndarray:
    # Haar-distributed orthogonal matrix: QR of a Gaussian with sign fix
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def gen_union_onb(d: int, m: int, seed: int) -> VectorFamily:
    """Concatenation of ``m`` random orthonormal bases of ``R^d`` (Bessel bound ``m``)."""
    d = _positive_int("d", d)
    m = _positive_int("m", m)
    rng = np.random.default_rng(seed)
    cols = [_random_onb(rng, d) for _ in range(m)]
    return VectorFamily.from_columns(np.hstack(cols))


def _bessel_bound(v: np.ndarray) -> float:
    return float(np.linalg.norm(v, 2) ** 2)


def gen_random_bessel(d: int, n: int, bessel: float, seed: int,
                      max_iter: int = 20000, slack: float = 1e-12) -> VectorFamily:
    """Seeded unit-norm family in ``R^d`` whose Bessel bound is at most ``bessel``.

    Random unit vectors are accepted as drawn if they already satisfy the
    bound.  Otherwise they are repeatedly pushed towards a tight frame
    (replace the synthesis matrix by its polar factor, renormalise columns)
    until the bound holds.  A request with ``bessel`` equal to the tight
    value ``n / d`` is met up to a relative ``slack``.
    """
    d = _positive_int("d", d)
    n = _positive_int("n", n)
    if not (isinstance(bessel, (int, float, np.floating)) and math.isfinite(bessel)):
        raise InputError(f"bessel bound must be a finite number, got {bessel!r}")
    if bessel < 1:
        raise InputError(f"a unit-norm family has Bessel bound >= 1, got target {bessel!r}")
    if bessel < n / d:
        raise PreconditionError(
            f"infeasible: Bessel bound {bessel!r} < n/d = {n / d!r} "
            "(the frame operator has trace n spread over d eigenvalues)", "bessel>=n/d")
    rng = np.random.default_rng(seed)
    if n == d and bessel == 1:
        return VectorFamily.from_columns(_random_onb(rng, d))
    v = rng.standard_normal((d, n))
    v /= np.linalg.norm(v, axis=0)
    limit = bessel * (1.0 + slack)
    for _ in range(max_iter):
        if _bessel_bound(v) <= limit:
            return VectorFamily.from_columns(v)
        u, _, wt = np.linalg.svd(v, full_matrices=False)
        v = u @ wt
        v /= np.linalg.norm(v, axis=0)
    raise PreconditionError(
        f"could not reach Bessel bound {bessel!r} in {max_iter} iterations", "convergence")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: Optional[int] = None
    dim: Optional[int] = None
    copies: Optional[int] = None
    bessel: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        randomized = self.kind in RANDOM_KINDS
        if (self.kind == "random_bessel" and None not in (self.n, self.dim, self.bessel)
                and self.bessel < self.n / self.dim):
            raise PreconditionError(
                f"infeasible: Bessel bound {self.bessel!r} < n/dim = {self.n / self.dim!r}",
                "bessel>=n/d")
        if randomized and self.seed is None:
            raise InputError(f"{self.kind} needs a seed")
        if not randomized and self.seed is not None:
            raise InputError(f"{self.kind} is deterministic and takes no seed")


def generate(spec: GeneratorSpec) -> VectorFamily:
    def need(name):
        value = getattr(spec, name)
        if value is None:
            raise InputError(f"{spec.kind} needs --{name}")
        return value

    if spec.kind == "shift_pair":
        return gen_shift_pair(need("n"))
    if spec.kind == "dyadic_reorder":
        return gen_dyadic_reorder(need("n"))
    if spec.kind == "union_onb":
        return gen_union_onb(need("dim"), spec.copies if spec.copies is not None else 1,
                             need("seed"))
    return gen_random_bessel(need("dim"), need("n"), need("bessel"), need("seed"))
