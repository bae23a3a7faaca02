"""Two-part decompositions of unit-norm Bessel families.

Indices are split into alternating blocks ``S_1, T_1, S_2, T_2, ...``.
After each block is fixed, the next one is chosen so that the energy the
remaining vectors leave in the span of all earlier same-kind blocks drops
below a geometric budget ``eps/2, eps/4, eps/8, ...``.  Subtracting that
energy from each vector (``g_i = f_i - P f_i``) makes the blocks of each part
mutually orthogonal while moving the part by less than ``eps`` in total.

Three block choosers are provided:

* ``ordered``: blocks are consecutive runs; each cut is the smallest one
  whose remaining suffix is under budget.
* ``greedy``: each block is the smallest set of remaining indices that gets
  the rest under budget (largest projections first).  Independent of order.
* ``riesz-scaled``: ``ordered`` with every budget multiplied by the lower
  Riesz bound of the prefix seen so far (independent families only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError, PreconditionError
from .frames import (
    CoefficientVector,
    check_partition,
    cross_coherence,
    is_linearly_independent,
    is_unit_norm,
    span_residual,
)
from .linops import (
    DEFAULT_TOL,
    Projector,
    Tolerances,
    VectorFamily,
    extend_range,
    gram,
    orthonormal_range,
)

STRATEGIES = ("ordered", "greedy", "riesz-scaled")
P_TAIL = "P-tail"
Q_TAIL = "Q-tail"


@dataclass(frozen=True)
class LedgerEntry:
    """Budget inequality certified when the block after ``entry`` was chosen.

    ``step`` counts induction steps: 0 for the first cut, then each step
    ``k >= 1`` contributes a Q-tail followed by a P-tail entry.
    """

    step: int
    kind: str
    threshold: float
    achieved: float
    delta_k: Optional[float] = None


@dataclass(frozen=True)
class BlockSchedule:
    cuts: tuple
    blocks_S: tuple
    blocks_T: tuple
    ledger: tuple

    def blocks_in_order(self) -> list:
        """``[S_1, T_1, S_2, T_2, ...]``."""
        out = []
        for m in range(max(len(self.blocks_S), len(self.blocks_T))):
            if m < len(self.blocks_S):
                out.append(self.blocks_S[m])
            if m < len(self.blocks_T):
                out.append(self.blocks_T[m])
        return out


@dataclass(frozen=True)
class DecompositionResult:
    strategy: str
    epsilon: float
    part_1: tuple
    part_2: tuple
    perturbed_1: VectorFamily
    perturbed_2: VectorFamily
    energies: tuple
    schedule: BlockSchedule
    start_index: int = 1
    allow_non_unit: bool = False

    @property
    def blocks_1(self) -> tuple:
        return self.schedule.blocks_S

    @property
    def blocks_2(self) -> tuple:
        return self.schedule.blocks_T

    @property
    def ledger(self) -> tuple:
        return self.schedule.ledger

    @property
    def energy_1(self) -> float:
        return self.energies[0]

    @property
    def energy_2(self) -> float:
        return self.energies[1]


@dataclass(frozen=True)
class LedgerCheck:
    ok: bool
    violation: Optional[dict] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class GkCheck:
    lhs: float
    rhs: float
    slack_ok: bool


@dataclass(frozen=True)
class PerturbationCertificate:
    crossing_index: int
    block_ids: tuple
    epsilon: float
    lhs: float
    rhs: float
    verdict: bool


def threshold_for(epsilon: float, entry_index: int, delta: float = 1.0) -> float:
    """Budget of the ``entry_index``-th ledger entry (0-based): ``eps / 2**(j+1) * delta``."""
    return epsilon / 2.0 ** (entry_index + 1) * delta


def entry_step(entry_index: int) -> int:
    return (entry_index + 1) // 2


def _check_common(F: VectorFamily, epsilon: float, tol: Tolerances, allow_non_unit: bool):
    if len(F) == 0:
        raise PreconditionError("family is empty", "nonempty")
    if not (isinstance(epsilon, (int, float, np.floating)) and math.isfinite(epsilon)):
        raise InputError(f"epsilon must be a finite number, got {epsilon!r}")
    if epsilon <= 0:
        raise PreconditionError(f"epsilon must be > 0, got {epsilon!r}", "epsilon>0")
    if not allow_non_unit and not is_unit_norm(F, tol):
        raise PreconditionError(
            "family is not unit-norm within report_tol (pass allow_non_unit to override)",
            "unit-norm")


def _suffix_sums(e: np.ndarray) -> np.ndarray:
    # tails[c] = sum(e[c:]); tails[len(e)] = 0
    out = np.zeros(e.size + 1)
    out[:-1] = np.cumsum(e[::-1])[::-1]
    return out


def _smallest_prefix(e: np.ndarray, threshold: float) -> tuple:
    tails = _suffix_sums(e)
    # block sizes start at 1: each cut strictly advances
    c = int(np.nonzero(tails[1:] < threshold)[0][0]) + 1
    return c, float(tails[c])


def _run(F: VectorFamily, epsilon: float, tol: Tolerances, first: int,
         rank_order: Optional[Callable[[list, np.ndarray], list]] = None,
         delta_for: Optional[Callable[[int, list], float]] = None) -> tuple:
    """Shared induction; returns (blocks as position lists, ledger, perturbed rows).

    ``rank_order`` permutes the remaining positions before the shortest
    admissible prefix is taken; ``None`` keeps index order.
    """
    n = len(F)
    dtype = F.vectors.dtype
    blocks = [[first]]
    remaining = [p for p in range(n) if p != first]
    ledger = []
    g = np.array(F.vectors, copy=True)
    proj = [extend_range(Projector.zero(F.dim, dtype), F, [F.labels[first]], tol),
            Projector.zero(F.dim, dtype)]
    while remaining:
        j = len(blocks) - 1
        parity = j % 2
        delta = delta_for(entry_step(j), blocks) if delta_for else None
        threshold = threshold_for(epsilon, j, 1.0 if delta is None else delta)
        energies = np.sum(np.abs(F.vectors[remaining] @ proj[parity].basis.conj()) ** 2, axis=1)
        if rank_order is not None:
            perm = rank_order(remaining, energies)
            remaining = [remaining[i] for i in perm]
            energies = energies[perm]
        size, achieved = _smallest_prefix(energies, threshold)
        block, remaining = remaining[:size], remaining[size:]
        ledger.append(LedgerEntry(entry_step(j), P_TAIL if parity == 0 else Q_TAIL,
                                  threshold, achieved, delta))
        other = proj[1 - parity]
        if other.rank:
            g[block] = F.vectors[block] - other.apply(F.vectors[block])
        proj[1 - parity] = extend_range(other, F, [F.labels[p] for p in block], tol)
        blocks.append(block)
    return blocks, ledger, g


def _assemble(F: VectorFamily, strategy: str, epsilon: float, blocks: list, ledger: list,
              g: np.ndarray, start_index: int, allow_non_unit: bool) -> DecompositionResult:
    labels = F.labels
    s_blocks = tuple(tuple(labels[p] for p in b) for b in blocks[0::2])
    t_blocks = tuple(tuple(labels[p] for p in b) for b in blocks[1::2])
    parts, fams, energies = [], [], []
    for which in (blocks[0::2], blocks[1::2]):
        pos = sorted(p for b in which for p in b)
        parts.append(tuple(labels[p] for p in pos))
        fams.append(VectorFamily(F.dim, g[pos].reshape(len(pos), F.dim),
                                 parts[-1], F.scalars))
        energies.append(float(np.sum(np.abs(F.vectors[pos] - g[pos]) ** 2)))
    cuts, total = [], 0
    for b in blocks:
        total += len(b)
        cuts.append(total)
    schedule = BlockSchedule(tuple(cuts), s_blocks, t_blocks, tuple(ledger))
    return DecompositionResult(strategy, float(epsilon), parts[0], parts[1], fams[0], fams[1],
                               tuple(energies), schedule, start_index, allow_non_unit)


def ordered_decompose(F: VectorFamily, epsilon: float, tol: Tolerances = DEFAULT_TOL,
                      allow_non_unit: bool = False) -> DecompositionResult:
    """Consecutive blocks with the smallest admissible cut at every step."""
    _check_common(F, epsilon, tol, allow_non_unit)
    blocks, ledger, g = _run(F, epsilon, tol, 0)
    return _assemble(F, "ordered", epsilon, blocks, ledger, g, 1, allow_non_unit)


def greedy_decompose(F: VectorFamily, epsilon: float, tol: Tolerances = DEFAULT_TOL,
                     start_index: int = 1, allow_non_unit: bool = False) -> DecompositionResult:
    """Order-free variant: each block is a minimum-size set of the remaining indices.

    Remaining indices are ranked by projected energy (descending, ties by
    smaller label) and the shortest nonempty prefix whose complement is under
    budget becomes the block.  ``start_index`` is the 1-based position of the
    vector forming ``S_1``.
    """
    _check_common(F, epsilon, tol, allow_non_unit)
    if not (isinstance(start_index, (int, np.integer)) and 1 <= start_index <= len(F)):
        raise InputError(f"start_index must be a position in 1..{len(F)}, got {start_index!r}")
    labels = F.labels

    def by_energy(remaining, energies):
        return sorted(range(len(remaining)), key=lambda i: (-energies[i], labels[remaining[i]]))

    blocks, ledger, g = _run(F, epsilon, tol, int(start_index) - 1, by_energy)
    return _assemble(F, "greedy", epsilon, blocks, ledger, g, int(start_index), allow_non_unit)


def prefix_riesz_lower(F: VectorFamily, n: int) -> float:
    """Smallest Gram eigenvalue of ``f_1..f_n`` (no rank cutoff)."""
    return float(np.linalg.eigvalsh(gram(F.subfamily(F.labels[:n])))[0])


def delta_prefix_length(step: int, cuts: list) -> int:
    """Prefix length whose lower Riesz bound scales the budgets of ``step``.

    Step ``k >= 1`` uses ``n_{2k}``, the end of ``T_k``; step 0 uses ``n_1``.
    """
    return cuts[max(2 * step - 1, 0)]


def riesz_scaled_decompose(F: VectorFamily, epsilon: float, tol: Tolerances = DEFAULT_TOL,
                           allow_non_unit: bool = False) -> DecompositionResult:
    """``ordered_decompose`` with budgets of step ``k`` multiplied by ``delta_k``.

    ``delta_k`` is the lower Riesz bound of the prefix ``f_1..f_{n_{2k}}``.
    Requires a linearly independent family.
    """
    _check_common(F, epsilon, tol, allow_non_unit)
    independent, margin = is_linearly_independent(F, tol)
    if not independent:
        raise PreconditionError(
            f"riesz-scaled strategy needs a linearly independent family (sigma_min = {margin:.3e})",
            "linearly-independent")

    def delta_for(step, blocks):
        cuts = np.cumsum([len(b) for b in blocks]).tolist()
        delta = prefix_riesz_lower(F, delta_prefix_length(step, cuts))
        if not delta > 0:
            raise PreconditionError(
                f"prefix lower Riesz bound is not positive at step {step}", "linearly-independent")
        return delta

    blocks, ledger, g = _run(F, epsilon, tol, 0, None, delta_for)
    return _assemble(F, "riesz-scaled", epsilon, blocks, ledger, g, 1, allow_non_unit)


def decompose(F: VectorFamily, epsilon: float, strategy: str = "ordered",
              tol: Tolerances = DEFAULT_TOL, start_index: int = 1,
              allow_non_unit: bool = False) -> DecompositionResult:
    if strategy == "ordered":
        return ordered_decompose(F, epsilon, tol, allow_non_unit)
    if strategy == "greedy":
        return greedy_decompose(F, epsilon, tol, start_index, allow_non_unit)
    if strategy == "riesz-scaled":
        return riesz_scaled_decompose(F, epsilon, tol, allow_non_unit)
    raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


# --------------------------------------------------------------------------
# verification


def _fail(**info) -> LedgerCheck:
    return LedgerCheck(False, info)


def _rel_close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b))


def verify_ledger(F: VectorFamily, result: DecompositionResult,
                  tol: Tolerances = DEFAULT_TOL) -> LedgerCheck:
    """Independently re-derive every certified inequality of ``result``.

    Checks, in order: the partition, the budget schedule and every tail sum
    (recomputed with freshly built projectors), block orthogonality and span
    preservation of both perturbed parts, and the perturbation energies.
    Returns the first violation found instead of raising.
    """
    try:
        order = result.schedule.blocks_in_order()
        positions = [F.positions(b) for b in order]
    except InputError as exc:
        return _fail(check="labels", detail=str(exc))
    flat = [p for b in positions for p in b]
    if sorted(flat) != list(range(len(F))) or any(not b for b in positions):
        return _fail(check="partition", detail="blocks do not partition the family")
    for part, blocks in ((result.part_1, result.blocks_1), (result.part_2, result.blocks_2)):
        if sorted(part) != sorted(x for b in blocks for x in b):
            return _fail(check="partition", detail="part does not match its blocks")
    if result.strategy in ("ordered", "riesz-scaled"):
        if flat != list(range(len(F))):
            return _fail(check="partition", detail="ordered blocks are not consecutive")
    if result.strategy == "greedy" and positions[0] != [result.start_index - 1]:
        return _fail(check="partition", detail="first block is not the start index")
    if len(result.ledger) != len(order) - 1:
        return _fail(check="ledger", detail="ledger length does not match block count")

    cuts = np.cumsum([len(b) for b in positions]).tolist()
    assigned = set()
    for j, entry in enumerate(result.ledger):
        assigned.update(positions[j])
        kind = P_TAIL if j % 2 == 0 else Q_TAIL
        if entry.step != entry_step(j) or entry.kind != kind:
            return _fail(check="ledger", entry=j, step=entry.step, detail="step/kind out of sequence")
        delta = 1.0
        if result.strategy == "riesz-scaled":
            delta = prefix_riesz_lower(F, delta_prefix_length(entry.step, cuts))
            if entry.delta_k is None or not _rel_close(entry.delta_k, delta, 1e-9):
                return _fail(check="ledger", entry=j, step=entry.step,
                             detail=f"delta_k {entry.delta_k!r} != recomputed {delta!r}")
        expected = threshold_for(result.epsilon, j, delta)
        if not _rel_close(entry.threshold, expected, 1e-12):
            return _fail(check="ledger", entry=j, step=entry.step,
                         detail=f"threshold {entry.threshold!r} != schedule {expected!r}")
        if not entry.achieved < entry.threshold:
            return _fail(check="ledger", entry=j, step=entry.step, kind=entry.kind,
                         threshold=entry.threshold, achieved=entry.achieved,
                         detail="achieved tail not below threshold")
        same = [F.labels[p] for b in positions[j % 2:j + 1:2] for p in b]
        P = orthonormal_range(F, same, tol)
        rest = [p for p in range(len(F)) if p not in assigned and p not in positions[j + 1]]
        tail = float(np.sum(np.abs(F.vectors[rest] @ P.basis.conj()) ** 2)) if rest else 0.0
        if abs(tail - entry.achieved) > tol.report_tol or not tail < entry.threshold + tol.report_tol:
            return _fail(check="ledger", entry=j, step=entry.step, kind=entry.kind,
                         threshold=entry.threshold, achieved=entry.achieved, recomputed=tail,
                         detail="recomputed tail disagrees with ledger")

    for idx, (part, blocks, G) in enumerate(
            ((result.part_1, result.blocks_1, result.perturbed_1),
             (result.part_2, result.blocks_2, result.perturbed_2)), start=1):
        if G.labels != tuple(part) or G.dim != F.dim:
            return _fail(check="labels", part=idx, detail="perturbed family labels do not match part")
        worst, pair = cross_coherence(G, blocks)
        if worst > tol.ortho_tol:
            return _fail(check="block_orthogonality", part=idx,
                         blocks=[pair[0] + 1, pair[1] + 1], coherence=worst)
        Fp = F.subfamily(part)
        resid = max(span_residual(Fp, G, tol), span_residual(G, Fp, tol))
        if resid > tol.ortho_tol:
            return _fail(check="span", part=idx, residual=resid)
        energy = float(np.sum(np.abs(Fp.vectors - G.vectors) ** 2))
        if abs(energy - result.energies[idx - 1]) > tol.report_tol:
            return _fail(check="energy", part=idx, energy=energy, recorded=result.energies[idx - 1])
        if not energy < result.epsilon:
            return _fail(check="energy", part=idx, energy=energy, epsilon=result.epsilon,
                         detail="perturbation energy not below epsilon")
    return LedgerCheck(True)


def gk_inequality_check(F: VectorFamily, result: DecompositionResult, a, k: int,
                        tol: Tolerances = DEFAULT_TOL) -> GkCheck:
    """Check ``||g_k|| <= ||a_tail|| * sqrt(sum_tail ||Q_k f_i||^2) + ||r||``.

    ``a`` is aligned with ``result.part_2``; ``g_k`` synthesises the
    coefficients on ``T_1..T_k``, ``r`` all of them, and the tail runs over
    ``T_{k+1}, T_{k+2}, ...``.  With ``r = 0`` this is the classical bound on
    the head of a null combination.
    """
    coeffs = a.entries if isinstance(a, CoefficientVector) else np.asarray(a)
    part = result.part_2
    if coeffs.shape != (len(part),):
        raise InputError(f"expected {len(part)} coefficients aligned to part_2")
    blocks = result.blocks_2
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= len(blocks)):
        raise InputError(f"k must be in 1..{len(blocks)}, got {k!r}")
    where = {lab: i for i, lab in enumerate(part)}
    head = [lab for b in blocks[:k] for lab in b]
    tail = [lab for b in blocks[k:] for lab in b]
    head_idx = [where[lab] for lab in head]
    tail_idx = [where[lab] for lab in tail]
    Fh = F.vectors[F.positions(head)]
    Ft = F.vectors[F.positions(tail)]
    Fall = F.vectors[F.positions(part)]
    g_k = coeffs[head_idx] @ Fh
    r = coeffs @ Fall
    Q = orthonormal_range(F, head, tol)
    tail_energy = float(np.sum(np.abs(Ft @ Q.basis.conj()) ** 2)) if tail else 0.0
    a_tail = float(np.sum(np.abs(coeffs[tail_idx]) ** 2))
    lhs = float(np.linalg.norm(g_k))
    rhs = math.sqrt(a_tail) * math.sqrt(tail_energy) + float(np.linalg.norm(r))
    slack = tol.report_tol * (1.0 + float(np.sum(np.abs(coeffs) ** 2)))
    return GkCheck(lhs, rhs, lhs <= rhs + slack)


def certificate_bounds(epsilon: float) -> tuple:
    """``(sqrt2 (1 - sqrt eps), 1 + 2 sqrt eps)``."""
    s = math.sqrt(epsilon)
    return math.sqrt(2.0) * (1.0 - s), 1.0 + 2.0 * s


def certificate_crossover() -> float:
    """Largest ``eps`` for which the certificate verdict can be true."""
    s = (math.sqrt(2.0) - 1.0) / (math.sqrt(2.0) + 2.0)
    return s * s


def impossibility_certificate(F: VectorFamily, blocks, epsilon: float,
                              tol: Tolerances = DEFAULT_TOL) -> PerturbationCertificate:
    """Show that no ``eps``-perturbation of ``F`` is orthogonal across ``blocks``.

    Finds the first position whose successor lies in another block.  If the
    two vectors there are unit vectors at distance one, any perturbation
    orthogonal across those blocks would need
    ``sqrt2 (1 - sqrt eps) <= 1 + 2 sqrt eps``; ``verdict`` is true when this
    fails, i.e. the block structure is impossible at this ``eps``.
    """
    if not (math.isfinite(epsilon) and epsilon >= 0):
        raise InputError(f"epsilon must be finite and >= 0, got {epsilon!r}")
    blocks = check_partition(F.labels, blocks)
    owner = {}
    for b, members in enumerate(blocks):
        for lab in members:
            owner[F.position(lab)] = b
    crossing = next((p for p in range(len(F) - 1) if owner[p] != owner[p + 1]), None)
    if crossing is None:
        raise PreconditionError("no consecutive pair crosses a block boundary", "crossing-index")
    f0, f1 = F.vectors[crossing], F.vectors[crossing + 1]
    checks = (np.linalg.norm(f0) - 1.0, np.linalg.norm(f1) - 1.0,
              np.linalg.norm(f0 - f1) ** 2 - 1.0)
    if max(abs(c) for c in checks) > tol.report_tol:
        raise PreconditionError(
            "crossing pair is not unit-norm at unit distance", "consecutive-overlap")
    lhs, rhs = certificate_bounds(epsilon)
    return PerturbationCertificate(
        crossing_index=F.labels[crossing],
        block_ids=(owner[crossing] + 1, owner[crossing + 1] + 1),
        epsilon=float(epsilon), lhs=lhs, rhs=rhs, verdict=lhs > rhs)
