"""Dense linear algebra substrate: families, Gram matrices, projectors, spectra.

Everything here is deterministic and side-effect free.  Families and
projectors hold read-only numpy arrays so they can be shared freely.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

TOL_ENV_VAR = "FRAME_DECOMP_TOL"


@dataclass(frozen=True)
class Tolerances:
    rank_rel_tol: float = 1e-10
    ortho_tol: float = 1e-9
    report_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel_tol", "ortho_tol", "report_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"tolerance {name} must be finite and > 0, got {value!r}")
        if self.rank_rel_tol >= 1:
            raise InputError("rank_rel_tol must be < 1")

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        """Defaults, optionally overridden by ``FRAME_DECOMP_TOL``.

        The variable holds comma separated ``key=value`` pairs, e.g.
        ``rank_rel_tol=1e-12,ortho_tol=1e-8``.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(TOL_ENV_VAR, "").strip()
        if not raw:
            return cls()
        values = {}
        for item in raw.split(","):
            if not item.strip():
                continue
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep or key not in ("rank_rel_tol", "ortho_tol", "report_tol"):
                raise InputError(f"bad {TOL_ENV_VAR} entry: {item!r}")
            try:
                values[key] = float(val)
            except ValueError:
                raise InputError(f"bad {TOL_ENV_VAR} value: {item!r}") from None
        return cls(**values)


DEFAULT_TOL = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """An ordered finite family of vectors in ``dim``-dimensional space.

    ``vectors`` has shape ``(N, dim)``; row ``i`` is the ``i``-th member.
    ``labels`` are external indices and default to ``1..N``.
    """

    dim: int
    vectors: np.ndarray
    labels: tuple = None
    scalars: str = "real"

    def __post_init__(self):
        if self.scalars not in ("real", "complex"):
            raise InputError(f"scalars must be 'real' or 'complex', got {self.scalars!r}")
        if not isinstance(self.dim, (int, np.integer)) or isinstance(self.dim, bool) or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        dtype = np.complex128 if self.scalars == "complex" else np.float64
        try:
            vecs = np.asarray(self.vectors, dtype=dtype)
        except (TypeError, ValueError) as exc:
            if self.scalars == "real" and np.iscomplexobj(np.asarray(self.vectors)):
                raise InputError("complex entries in a real family") from None
            raise InputError(f"vectors are not a numeric array: {exc}") from None
        if vecs.size == 0:
            vecs = vecs.reshape(0, self.dim)
        if vecs.ndim != 2 or vecs.shape[1] != self.dim:
            raise InputError(
                f"vectors must have shape (N, {self.dim}), got {tuple(vecs.shape)}")
        if not np.all(np.isfinite(vecs)):
            raise InputError("vectors contain NaN or Inf")
        n = vecs.shape[0]
        if self.labels is None:
            labels = tuple(range(1, n + 1))
        else:
            labels = tuple(int(x) for x in self.labels)
            if len(labels) != n:
                raise InputError(f"{len(labels)} labels for {n} vectors")
            if len(set(labels)) != n:
                raise InputError("labels must be pairwise distinct")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "vectors", _frozen(vecs))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_pos", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def from_columns(cls, matrix, labels=None, scalars=None) -> "VectorFamily":
        """Build a family from a ``dim x N`` synthesis matrix."""
        m = np.asarray(matrix)
        if m.ndim != 2:
            raise InputError("synthesis matrix must be 2-D")
        if scalars is None:
            scalars = "complex" if np.iscomplexobj(m) else "real"
        return cls(dim=m.shape[0], vectors=m.T, labels=labels, scalars=scalars)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def synthesis(self) -> np.ndarray:
        """The ``dim x N`` matrix whose columns are the family members."""
        return self.vectors.T

    def position(self, label) -> int:
        """0-based position of ``label``."""
        try:
            return self._pos[int(label)]
        except (KeyError, TypeError, ValueError):
            raise InputError(f"unknown label {label!r}") from None

    def positions(self, labels: Iterable) -> list:
        return [self.position(lab) for lab in labels]

    def subfamily(self, labels: Sequence) -> "VectorFamily":
        pos = self.positions(labels)
        return VectorFamily(self.dim, self.vectors[pos], tuple(labels), self.scalars)

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def with_vectors(self, vectors) -> "VectorFamily":
        return VectorFamily(self.dim, vectors, self.labels, self.scalars)

    def permuted(self, order: Sequence[int]) -> "VectorFamily":
        """Reorder by 0-based positions, keeping each vector's label."""
        order = list(order)
        return VectorFamily(self.dim, self.vectors[order],
                            tuple(self.labels[i] for i in order), self.scalars)

    def same_as(self, other: "VectorFamily") -> bool:
        return (self.dim == other.dim and self.scalars == other.scalars
                and self.labels == other.labels
                and self.vectors.shape == other.vectors.shape
                and np.array_equal(self.vectors, other.vectors))


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector stored through an orthonormal basis of its range."""

    dim: int
    basis: np.ndarray
    source: tuple = ()
    scale: float = field(default=0.0, compare=False)

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.size == 0:
            b = np.zeros((self.dim, 0), dtype=b.dtype if b.dtype.kind in "fc" else np.float64)
        if b.ndim != 2 or b.shape[0] != self.dim:
            raise InputError(f"basis must have {self.dim} rows")
        object.__setattr__(self, "basis", _frozen(b))
        object.__setattr__(self, "source", tuple(self.source))

    @classmethod
    def zero(cls, dim: int, dtype=np.float64) -> "Projector":
        return cls(dim, np.zeros((dim, 0), dtype=dtype))

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Project a vector (shape ``(dim,)``) or rows of an ``(n, dim)`` array."""
        x = np.asarray(x)
        b = self.basis
        if x.ndim == 1:
            return b @ (b.conj().T @ x)
        return (x @ b.conj()) @ b.T

    def matrix(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def gram(F: VectorFamily) -> np.ndarray:
    """Gram matrix with entry ``(i, j) = <f_i, f_j>`` (linear in the first slot)."""
    v = F.vectors
    return v @ v.conj().T


def _synthesis_scale(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def orthonormal_range(F: VectorFamily, subset: Iterable, tol: Tolerances = DEFAULT_TOL) -> Projector:
    """Projector onto ``span{f_i : i in subset}`` (``subset`` holds labels).

    Numerical rank comes from a thin SVD: singular values at or below
    ``rank_rel_tol`` times the largest one are dropped.
    """
    labels = tuple(subset)
    pos = F.positions(labels)
    dtype = F.vectors.dtype
    if not pos:
        return Projector(F.dim, np.zeros((F.dim, 0), dtype=dtype), labels)
    a = F.vectors[pos].T
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    smax = float(s[0]) if s.size else 0.0
    if smax == 0.0:
        return Projector(F.dim, np.zeros((F.dim, 0), dtype=dtype), labels, 0.0)
    r = int(np.count_nonzero(s > tol.rank_rel_tol * smax))
    return Projector(F.dim, u[:, :r], labels, smax)


def extend_range(P: Projector, F: VectorFamily, subset: Iterable,
                 tol: Tolerances = DEFAULT_TOL) -> Projector:
    """Projector onto ``range(P) + span{f_i : i in subset}``.

    The old basis is kept verbatim and new directions are appended, so the
    ranges of successive extensions are nested exactly.
    """
    labels = tuple(subset)
    if P.dim != F.dim:
        raise InputError(f"projector dim {P.dim} != family dim {F.dim}")
    source = P.source + labels
    if not labels:
        return P
    a = F.vectors[F.positions(labels)].T
    scale = max(P.scale, _synthesis_scale(F.vectors[F.positions(source)].T))
    b = P.basis
    resid = a
    if b.shape[1]:
        # two passes of classical Gram-Schmidt keep the new block orthogonal
        for _ in range(2):
            resid = resid - b @ (b.conj().T @ resid)
    if scale == 0.0:
        return Projector(P.dim, b, source, 0.0)
    u, s, _ = np.linalg.svd(resid, full_matrices=False)
    r = int(np.count_nonzero(s > tol.rank_rel_tol * scale))
    if b.dtype != u.dtype:
        b = b.astype(np.result_type(b, u))
    return Projector(P.dim, np.hstack([b, u[:, :r]]), source, scale)


def project_energy(P: Projector, F: VectorFamily, from_index: int = 1):
    """Values ``||P f_i||^2`` for positions ``>= from_index`` (1-based) and their sum."""
    if P.dim != F.dim:
        raise InputError(f"projector dim {P.dim} != family dim {F.dim}")
    if from_index < 1:
        raise InputError("from_index is 1-based")
    v = F.vectors[from_index - 1:]
    coeffs = v @ P.basis.conj()
    values = np.sum(np.abs(coeffs) ** 2, axis=1)
    return values, float(np.sum(values))


def is_hermitian(M: np.ndarray, tol: float) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if M.size == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(M))))
    return float(np.max(np.abs(M - M.conj().T))) <= tol * scale


def symmetric_spectrum(M, tol: Tolerances = DEFAULT_TOL):
    """``(min eigenvalue, max eigenvalue, ascending spectrum)`` of a Hermitian matrix."""
    M = np.asarray(M)
    if not is_hermitian(M, tol.report_tol):
        raise InputError("matrix is not Hermitian within report_tol")
    if M.size == 0:
        raise InputError("empty matrix has no spectrum")
    w = np.linalg.eigvalsh(M)
    return float(w[0]), float(w[-1]), w
