"""Operators on l^p(Z^n) given by a discrete kernel K(j, m).

A :class:`LatticeKernel` is an evaluation rule on Z^n x Z^n.  All partial
sums run over the sup-norm box |.|_inf <= R in lexicographic index order, so
they are exactly enumerable, trivially nestable in R, and deterministic.
Unbounded-support kernels are legal: results are then relative to the chosen
cutoff, with the series tail reported rather than hidden.

Trace powers Tr(T^m) of the truncated operator are computed from matrix
powers (dense, diagonal or sparse depending on declared structure); the
literal m-fold cycle sums live in :mod:`specdet.oracle` and are kept as
cross-checks only, since nested sums cost N^m.

Everything is a pure function of immutable inputs.  Box enumeration may be
partitioned across workers, but partial results must be re-reduced in the
fixed lexicographic partition order to preserve bitwise determinism.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import EvaluationError, FeasibilityError, ParameterError
from .plemelj import DetResult, TracePowerSource, plemelj_det

__all__ = [
    "Index",
    "LatticeKernel",
    "iter_box",
    "box_side",
    "nuclear_norm_estimate",
    "lattice_trace",
    "truncation_trace_source",
    "cycle_trace",
    "lattice_determinant",
    "diagonal_kernel",
    "diagonal_kernel_from_rule",
    "rank_one_kernel",
    "banded_kernel",
    "table_kernel",
    "poincare_strict_kernel",
]

Index = tuple  # tuple[int, ...] of length dim

#: largest truncation side handled densely before structure is required
DENSE_SIDE_LIMIT = 2048
#: brute-force guard for box-squared enumerations without a support iterator
BRUTE_PAIR_LIMIT = 4_000_000


def iter_box(dim: int, cutoff: int) -> Iterator[Index]:
    """Lexicographic walk of the box |.|_inf <= cutoff in Z^dim."""
    return itertools.product(range(-cutoff, cutoff + 1), repeat=dim)


def box_side(dim: int, cutoff: int) -> int:
    return (2 * cutoff + 1) ** dim


@dataclass
class LatticeKernel:
    """Complex kernel on Z^dim x Z^dim with declared structure.

    ``eval`` maps a pair of length-``dim`` integer tuples to a complex
    value and must be deterministic.  ``declared_support`` promises the
    kernel vanishes outside the box |.|_inf <= R0 (spot-checked here);
    ``band_radius`` promises it vanishes for |j - m|_inf > b.
    ``support_iter``, when given, yields every nonzero (j, m, value) with
    both indices in the box |.|_inf <= R, in a fixed order; it unlocks
    norm and trace computations at cutoffs far beyond dense enumeration.
    """

    dim: int
    eval: Callable[[Index, Index], complex]
    declared_support: int | None = None
    band_radius: int | None = None
    support_iter: Callable[[int], Iterable[tuple]] | None = None
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError(f"kernel dimension must be >= 1, got {self.dim}")
        if self.declared_support is not None:
            self._spot_check_support()

    def _spot_check_support(self):
        r0 = self.declared_support
        origin = (0,) * self.dim
        far = [(r0 + 1,) + (0,) * (self.dim - 1),
               (0,) * (self.dim - 1) + (r0 + 3,),
               (r0 + 7,) * self.dim]
        for outside in far:
            for j, m in ((outside, origin), (origin, outside), (outside, outside)):
                if self.eval(j, m) != 0:
                    raise EvaluationError(
                        f"kernel {self.label!r} declares support radius {r0} "
                        f"but is nonzero at (j={j}, m={m})"
                    )

    def value(self, j: Index, m: Index) -> complex:
        v = complex(self.eval(j, m))
        if not cmath.isfinite(v):
            raise EvaluationError(
                f"kernel {self.label!r} is non-finite at (j={j}, m={m})"
            )
        return v


def _sorted_support(k: LatticeKernel, cutoff: int) -> list[tuple]:
    entries = list(k.support_iter(cutoff))
    entries.sort(key=lambda e: (e[0], e[1]))
    return entries


def nuclear_norm_estimate(k: LatticeKernel, p: float = 1.0, cutoff: int = 8) -> float:
    """Partial sum of sum_j (sum_m |K(j,m)|^p)^(1/p) over the box |.| <= R.

    Finiteness of the full sum is the standard sufficient condition for the
    kernel to define a nuclear operator on l^p; the partial sums are
    monotone nondecreasing in the cutoff, so growth across cutoffs is the
    divergence diagnostic.
    """
    if cutoff < 1:
        raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
    if not (1.0 <= p < math.inf):
        raise ParameterError(f"p must lie in [1, inf), got {p}")
    if k.support_iter is not None:
        rows: dict = {}
        for j, m, v in _sorted_support(k, cutoff):
            v = complex(v)
            if not cmath.isfinite(v):
                raise EvaluationError(
                    f"kernel {k.label!r} is non-finite at (j={j}, m={m})"
                )
            rows[j] = rows.get(j, 0.0) + abs(v) ** p
        return float(sum(rows[j] ** (1.0 / p) for j in sorted(rows)))
    side = box_side(k.dim, cutoff)
    if side * side > BRUTE_PAIR_LIMIT:
        raise FeasibilityError(
            f"norm estimate needs {side * side} kernel evaluations at cutoff "
            f"{cutoff} and the kernel declares no support iterator",
            count=side * side,
        )
    total = 0.0
    for j in iter_box(k.dim, cutoff):
        row = 0.0
        for m in iter_box(k.dim, cutoff):
            row += abs(k.value(j, m)) ** p
        total += row ** (1.0 / p)
    return total


def lattice_trace(k: LatticeKernel, cutoff: int) -> complex:
    """Diagonal sum sum_{|n| <= R} K(n, n) in index-ascending order."""
    if cutoff < 1:
        raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
    if k.support_iter is not None:
        acc = 0.0j
        for j, m, v in _sorted_support(k, cutoff):
            if j == m:
                acc += complex(v)
        return acc
    side = box_side(k.dim, cutoff)
    if side > BRUTE_PAIR_LIMIT:
        raise FeasibilityError(
            f"trace needs {side} kernel evaluations at cutoff {cutoff} "
            f"and the kernel declares no support iterator",
            count=side,
        )
    acc = 0.0j
    for n in iter_box(k.dim, cutoff):
        acc += k.value(n, n)
    return acc


class _IndexMap:
    """Lexicographic bijection between box points and 0-based positions."""

    def __init__(self, dim: int, cutoff: int):
        self.points = list(iter_box(dim, cutoff))
        self.position = {pt: i for i, pt in enumerate(self.points)}


def _assemble_dense(k: LatticeKernel, cutoff: int) -> np.ndarray:
    imap = _IndexMap(k.dim, cutoff)
    side = len(imap.points)
    a = np.zeros((side, side), dtype=np.complex128)
    if k.support_iter is not None:
        for j, m, v in k.support_iter(cutoff):
            a[imap.position[j], imap.position[m]] = complex(v)
    else:
        band = k.band_radius
        for r, j in enumerate(imap.points):
            for c, m in enumerate(imap.points):
                if band is not None and max(abs(x - y) for x, y in zip(j, m)) > band:
                    continue
                a[r, c] = complex(k.eval(j, m))
    if not np.isfinite(a).all():
        bad = np.argwhere(~np.isfinite(a))[0]
        raise EvaluationError(
            f"kernel {k.label!r} is non-finite at (j={imap.points[bad[0]]}, "
            f"m={imap.points[bad[1]]})"
        )
    return a


class _TracePowers:
    """Incremental Tr(T^m) of the box truncation of a kernel.

    Picks a representation once (diagonal vector, dense array, or sparse
    matrix) and caches traces as successive powers are formed, so a
    determinant evaluation costs one matrix product per series order.
    """

    def __init__(self, k: LatticeKernel, cutoff: int):
        if cutoff < 1:
            raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
        self.side = box_side(k.dim, cutoff)
        self._traces: list[complex] = []
        if k.band_radius == 0:
            diag = np.empty(self.side, dtype=np.complex128)
            for i, n in enumerate(iter_box(k.dim, cutoff)):
                diag[i] = complex(k.eval(n, n))
            if not np.isfinite(diag).all():
                bad = list(iter_box(k.dim, cutoff))[int(np.argwhere(~np.isfinite(diag))[0])]
                raise EvaluationError(f"kernel {k.label!r} is non-finite at (j={bad}, m={bad})")
            self._mode = "diag"
            self._diag = diag
            self._cur = diag.copy()
        elif self.side <= DENSE_SIDE_LIMIT:
            self._mode = "dense"
            self._base = _assemble_dense(k, cutoff)
            self._cur = self._base.copy()
        elif k.support_iter is not None or k.band_radius is not None:
            from scipy import sparse

            imap = _IndexMap(k.dim, cutoff)
            rows, cols, vals = [], [], []
            if k.support_iter is not None:
                source = k.support_iter(cutoff)
            else:
                source = _band_entries(k, cutoff)
            for j, m, v in source:
                v = complex(v)
                if not cmath.isfinite(v):
                    raise EvaluationError(
                        f"kernel {k.label!r} is non-finite at (j={j}, m={m})"
                    )
                if v != 0:
                    rows.append(imap.position[j])
                    cols.append(imap.position[m])
                    vals.append(v)
            self._mode = "sparse"
            self._base = sparse.csr_matrix(
                (vals, (rows, cols)), shape=(self.side, self.side), dtype=np.complex128
            )
            self._cur = self._base.copy()
        else:
            raise FeasibilityError(
                f"truncation side {self.side} exceeds the dense limit "
                f"{DENSE_SIDE_LIMIT} and the kernel declares neither a band "
                f"radius nor a support iterator",
                count=self.side,
            )

    def trace(self, m: int) -> complex:
        if m < 1:
            raise ParameterError(f"trace power must be >= 1, got {m}")
        while len(self._traces) < m:
            if self._traces:  # advance current power by one order
                if self._mode == "diag":
                    self._cur = self._cur * self._diag
                elif self._mode == "dense":
                    self._cur = self._cur @ self._base
                else:
                    self._cur = self._cur @ self._base
            if self._mode == "diag":
                self._traces.append(complex(self._cur.sum()))
            elif self._mode == "dense":
                self._traces.append(complex(np.trace(self._cur)))
            else:
                self._traces.append(complex(self._cur.diagonal().sum()))
        return self._traces[m - 1]


def _band_entries(k: LatticeKernel, cutoff: int) -> Iterator[tuple]:
    band = k.band_radius
    for j in iter_box(k.dim, cutoff):
        for offset in itertools.product(range(-band, band + 1), repeat=k.dim):
            m = tuple(x + d for x, d in zip(j, offset))
            if all(abs(x) <= cutoff for x in m):
                yield j, m, k.eval(j, m)


def truncation_trace_source(k: LatticeKernel, cutoff: int,
                            norm_hint: float | None = None) -> TracePowerSource:
    """Trace-power source m -> Tr(T^m) of the box truncation, with powers
    formed incrementally so ascending queries cost one product each."""
    return TracePowerSource(_TracePowers(k, cutoff).trace,
                            norm_hint=norm_hint, label=k.label)


def cycle_trace(k: LatticeKernel, m: int, cutoff: int) -> complex:
    """Tr(T^m) over the box truncation, i.e. the sum over closed index
    chains j_0 -> j_1 -> ... -> j_m = j_0 of prod_s K(j_{s-1}, j_s).

    Computed through matrix powers of the truncation (cost O(m N^3) with
    N the box side) rather than the literal N^m nested sum; the two agree
    exactly on the truncation and the nested sum is retained in
    :mod:`specdet.oracle` as a cross-check.
    """
    if m < 1:
        raise ParameterError(f"cycle order must be >= 1, got {m}")
    return _TracePowers(k, cutoff).trace(m)


def lattice_determinant(k: LatticeKernel, lam: complex, order: int = 30,
                        cutoff: int = 8, tol: float = 1e-10) -> DetResult:
    """Determinant Det(I + lambda*T) of the box truncation via the trace
    series, with per-order terms and convergence diagnostics.

    The truncation norm is estimated first when that is cheap; if
    |lambda| times the norm reaches 1 the computation proceeds anyway and
    a warning lands in the diagnostics, because the series disc is not
    known a priori and the ratio test reports the observed behaviour.
    """
    if order < 1 or cutoff < 1:
        raise ParameterError(
            f"order and cutoff must be >= 1, got order={order}, cutoff={cutoff}"
        )
    diagnostics: dict = {}
    norm = None
    try:
        norm = nuclear_norm_estimate(k, 1.0, cutoff)
        diagnostics["nuclear_norm_estimate"] = norm
        if abs(lam) * norm >= 1.0:
            diagnostics.setdefault("warnings", []).append(
                f"|lambda|*norm = {abs(lam) * norm:.6g} >= 1; the series may "
                f"converge slowly or not at all"
            )
    except FeasibilityError as exc:
        diagnostics["norm_check"] = f"skipped: {exc}"

    src = truncation_trace_source(k, cutoff, norm_hint=norm)
    result = plemelj_det(src, lam, order=order, tol=tol)
    result.cutoff_used = cutoff
    merged = dict(diagnostics)
    for key, val in result.diagnostics.items():
        if key == "warnings" and "warnings" in merged:
            merged["warnings"] = merged["warnings"] + val
        else:
            merged[key] = val
    result.diagnostics = merged
    return result


# ---------------------------------------------------------------------------
# Built-in kernel families
# ---------------------------------------------------------------------------

def _as_index(j, dim: int) -> Index:
    if isinstance(j, tuple):
        idx = tuple(int(x) for x in j)
    elif isinstance(j, (list, np.ndarray)):
        idx = tuple(int(x) for x in j)
    else:
        idx = (int(j),)
    if len(idx) != dim:
        raise ParameterError(f"index {j!r} does not have dimension {dim}")
    return idx


def _sup_norm(j: Index) -> int:
    return max(abs(x) for x in j) if j else 0


def diagonal_kernel(entries, dim: int = 1, label: str = "diagonal") -> LatticeKernel:
    """K(j, j) = given value on a finite set of diagonal sites, else 0."""
    table = {_as_index(j, dim): complex(v) for j, v in dict(entries).items()}
    support = max((_sup_norm(j) for j in table), default=0)

    def eval_fn(j, m):
        return table.get(j, 0.0j) if j == m else 0.0j

    def support_entries(cutoff):
        for j in sorted(table):
            if _sup_norm(j) <= cutoff:
                yield j, j, table[j]

    return LatticeKernel(dim, eval_fn, declared_support=support, band_radius=0,
                         support_iter=support_entries, label=label)


def diagonal_kernel_from_rule(rule: Callable[[Index], complex], dim: int = 1,
                              label: str = "diagonal-rule") -> LatticeKernel:
    """Diagonal kernel K(j, j) = rule(j) with unbounded support."""

    def eval_fn(j, m):
        return complex(rule(j)) if j == m else 0.0j

    def support_entries(cutoff):
        for j in iter_box(dim, cutoff):
            v = complex(rule(j))
            if v != 0:
                yield j, j, v

    return LatticeKernel(dim, eval_fn, declared_support=None, band_radius=0,
                         support_iter=support_entries, label=label)


def rank_one_kernel(g, h, dim: int = 1, label: str = "rank-one") -> LatticeKernel:
    """K(j, m) = g(j) * h(m) for finitely supported tables g and h."""
    gt = {_as_index(j, dim): complex(v) for j, v in dict(g).items()}
    ht = {_as_index(j, dim): complex(v) for j, v in dict(h).items()}
    support = max(
        max((_sup_norm(j) for j in gt), default=0),
        max((_sup_norm(j) for j in ht), default=0),
    )

    def eval_fn(j, m):
        return gt.get(j, 0.0j) * ht.get(m, 0.0j)

    def support_entries(cutoff):
        for j in sorted(gt):
            if _sup_norm(j) > cutoff:
                continue
            for m in sorted(ht):
                if _sup_norm(m) <= cutoff:
                    yield j, m, gt[j] * ht[m]

    return LatticeKernel(dim, eval_fn, declared_support=support,
                         support_iter=support_entries, label=label)


def banded_kernel(offsets, support: int, dim: int = 1,
                  label: str = "banded") -> LatticeKernel:
    """Toeplitz band on a box: K(j, m) = c_{m-j} for |j|,|m| <= support."""
    if support < 0:
        raise ParameterError(f"support must be >= 0, got {support}")
    off = {_as_index(d, dim): complex(v) for d, v in dict(offsets).items()}
    band = max((_sup_norm(d) for d in off), default=0)

    def eval_fn(j, m):
        if _sup_norm(j) > support or _sup_norm(m) > support:
            return 0.0j
        return off.get(tuple(y - x for x, y in zip(j, m)), 0.0j)

    def support_entries(cutoff):
        r = min(cutoff, support)
        for j in iter_box(dim, r):
            for d in sorted(off):
                m = tuple(x + y for x, y in zip(j, d))
                if _sup_norm(m) <= r:
                    yield j, m, off[d]

    return LatticeKernel(dim, eval_fn, declared_support=support, band_radius=band,
                         support_iter=support_entries, label=label)


def table_kernel(entries, dim: int = 1, label: str = "table") -> LatticeKernel:
    """Kernel from an explicit finite list of ((j, m), value) sites."""
    table = {}
    for (j, m), v in dict(entries).items():
        table[(_as_index(j, dim), _as_index(m, dim))] = complex(v)
    support = max(
        (max(_sup_norm(j), _sup_norm(m)) for j, m in table), default=0
    )

    def eval_fn(j, m):
        return table.get((j, m), 0.0j)

    def support_entries(cutoff):
        for j, m in sorted(table):
            if _sup_norm(j) <= cutoff and _sup_norm(m) <= cutoff:
                yield j, m, table[(j, m)]

    return LatticeKernel(dim, eval_fn, declared_support=support,
                         support_iter=support_entries, label=label)


def poincare_strict_kernel(label: str = "poincare-strict") -> LatticeKernel:
    """The trace-class matrix whose summed-entry norm diverges.

    Row one holds 1/k for k >= 1 and the diagonal holds 1/j^2 for j != 0
    (the (1,1) site is 1 under both rules).  Its eigenvalues are the
    diagonal values, so the eigenvalue sums converge while the entrywise
    l^1 norm grows like the harmonic series.
    """

    def eval_fn(j, m):
        if j == m and j[0] != 0:
            return complex(1.0 / j[0] ** 2)
        if j[0] == 1 and m[0] >= 1:
            return complex(1.0 / m[0])
        return 0.0j

    def support_entries(cutoff):
        for jj in range(-cutoff, cutoff + 1):
            if jj != 0:
                yield (jj,), (jj,), complex(1.0 / jj ** 2)
        for kk in range(2, cutoff + 1):
            yield (1,), (kk,), complex(1.0 / kk)

    return LatticeKernel(1, eval_fn, declared_support=None,
                         support_iter=support_entries, label=label)
