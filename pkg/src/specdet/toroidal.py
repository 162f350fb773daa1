"""Toroidal symbols sigma(x, k) on T^n x Z^n and their quantization.

The torus is parameterized as [0,1)^n and the Fourier transform follows the
e^{-2*pi*i*x.k} convention, so the Fourier coefficient of sigma(., k) at the
mode l is

    sigma_hat(l, k) = int_{T^n} e^{-2*pi*i*x.l} sigma(x, k) dx,

approximated by the uniform-grid DFT (exact for trigonometric polynomials of
degree < N_x - |l|).  The quantized operator acts on Fourier coefficients
through the matrix

    A[j, k] = sigma_hat(j - k, k),

which is handed to :mod:`specdet.lattice` as a kernel supported on the box
|.|_inf <= R.  Requested modes at or beyond N_x/2 are rejected outright
rather than silently folded, since aliased coefficients would corrupt the
matrix invisibly.

The declared symbol order nu is never trusted for correctness; it only
drives warnings and the decay diagnostics, because rapid decay in k is a
sufficient condition whose sharpness is exactly what the norm-growth
profile is for.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AliasingError, EvaluationError, FeasibilityError, ParameterError
from .lattice import Index, LatticeKernel, iter_box, lattice_determinant, nuclear_norm_estimate
from .plemelj import DetResult

__all__ = [
    "ToroidalSymbol",
    "symbol_fourier_coeff",
    "toroidal_matrix",
    "poincare_norm",
    "schur_bound",
    "toroidal_determinant",
    "NormGrowthProfile",
    "growth_verdict",
    "norm_growth_profile",
    "power_decay_symbol",
    "sharpness_symbol",
    "modulated_symbol",
    "table_symbol",
]

#: increment ratio below which a norm profile counts as geometric decay
CONVERGENCE_RATIO = 0.9


@dataclass
class ToroidalSymbol:
    """Pointwise-evaluable symbol sigma(x, k) with declared order.

    ``eval`` takes (x, k) with x a tuple of floats in [0,1)^dim and k an
    integer tuple, and must be deterministic and finite on sampled points.
    ``x_grid`` fixes the number of samples per coordinate for Fourier
    coefficients; when None a power-of-two grid of at least 4*(2R+1)
    points is chosen per cutoff.  ``x_independent`` declares that sigma
    does not depend on x, which is verified on sampled points.
    """

    dim: int
    order: float
    eval: Callable[[tuple, Index], complex]
    x_grid: int | None = None
    x_independent: bool = False
    label: str = ""
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError(f"symbol dimension must be >= 1, got {self.dim}")
        if self.x_grid is not None and self.x_grid < 2:
            raise ParameterError(f"x_grid must be >= 2, got {self.x_grid}")


def _auto_grid(max_mode: int) -> int:
    """Power-of-two grid size of at least 4*(2*max_mode + 1) points."""
    needed = max(16, 4 * (2 * max(0, max_mode) + 1))
    return 1 << (needed - 1).bit_length()


def _check_alias(l: Index, n_x: int, label: str):
    mode = max((abs(x) for x in l), default=0)
    if 2 * mode >= n_x:
        raise AliasingError(
            f"mode {l} aliases on a {n_x}-point grid for symbol {label!r}; "
            f"need |l|_inf < {n_x / 2:g}"
        )


def _sample_value(s: ToroidalSymbol, x: tuple, k: Index) -> complex:
    v = complex(s.eval(x, k))
    if not cmath.isfinite(v):
        raise EvaluationError(f"symbol {s.label!r} is non-finite at (x={x}, k={k})")
    return v


class _SingleModeTable:
    """Coefficient table of an x-independent symbol: g(k) at the zero mode,
    exact zero everywhere else.  Indexable like the DFT array it replaces."""

    __slots__ = ("base",)

    def __init__(self, base: complex):
        self.base = base

    def __getitem__(self, l):
        return self.base if all(v == 0 for v in l) else 0.0j


def _coeff_table(s: ToroidalSymbol, k: Index, n_x: int):
    """DFT coefficient table of sigma(., k); cached per (k, n_x)."""
    key = (k, n_x)
    cached = s._tables.get(key)
    if cached is not None:
        return cached
    if s.x_independent:
        # x-independence makes the table g(k)*delta_{l,0}; verify the claim
        # on a few grid points instead of transforming a constant array.
        base = _sample_value(s, (0.0,) * s.dim, k)
        for probe in (1, 3, 5):
            x = ((probe / n_x) % 1.0,) * s.dim
            v = _sample_value(s, x, k)
            if abs(v - base) > 1e-12 * max(1.0, abs(base)):
                raise EvaluationError(
                    f"symbol {s.label!r} is declared x-independent but "
                    f"sigma({x}, {k}) differs from sigma(0, {k})"
                )
        table = _SingleModeTable(base)
    else:
        grid = np.arange(n_x) / n_x
        samples = np.empty((n_x,) * s.dim, dtype=np.complex128)
        for pos in itertools.product(range(n_x), repeat=s.dim):
            x = tuple(grid[p] for p in pos)
            samples[pos] = _sample_value(s, x, k)
        table = np.fft.fftn(samples) / samples.size
    s._tables[key] = table
    return table


def symbol_fourier_coeff(s: ToroidalSymbol, l, k, x_grid: int | None = None) -> complex:
    """Grid approximation of the x-Fourier coefficient sigma_hat(l, k)."""
    l = tuple(int(v) for v in (l if isinstance(l, (tuple, list)) else (l,)))
    k = tuple(int(v) for v in (k if isinstance(k, (tuple, list)) else (k,)))
    if len(l) != s.dim or len(k) != s.dim:
        raise ParameterError(f"indices {l}, {k} do not have dimension {s.dim}")
    n_x = x_grid or s.x_grid or _auto_grid(max((abs(v) for v in l), default=1))
    _check_alias(l, n_x, s.label)
    table = _coeff_table(s, k, n_x)
    return complex(table[tuple(v % n_x for v in l)])


def toroidal_matrix(s: ToroidalSymbol, cutoff: int) -> LatticeKernel:
    """Quantization matrix A[j, k] = sigma_hat(j - k, k) on the box |.| <= R,
    packaged as a lattice kernel with declared support R."""
    if cutoff < 1:
        raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
    n_x = s.x_grid or _auto_grid(2 * cutoff)
    _check_alias((2 * cutoff,) * s.dim, n_x, s.label)
    tables = {k: _coeff_table(s, k, n_x) for k in iter_box(s.dim, cutoff)}

    def eval_fn(j: Index, m: Index) -> complex:
        if max(abs(x) for x in j) > cutoff or max(abs(x) for x in m) > cutoff:
            return 0.0j
        l = tuple((a - b) % n_x for a, b in zip(j, m))
        return complex(tables[m][l])

    label = f"quantized:{s.label}" if s.label else "quantized"
    support_iter = None
    if s.x_independent:
        # diagonal matrix: expose the nonzero sites so norms and traces
        # stay O(box) instead of O(box^2) at large cutoffs
        zero_mode = (0,) * s.dim

        def support_iter(r):
            for m in iter_box(s.dim, min(r, cutoff)):
                v = complex(tables[m][zero_mode])
                if v != 0:
                    yield m, m, v

    band = 0 if s.x_independent else None
    return LatticeKernel(s.dim, eval_fn, declared_support=cutoff,
                         band_radius=band, support_iter=support_iter,
                         label=label)


def poincare_norm(k: LatticeKernel, cutoff: int) -> float:
    """Summed-entry norm sum_{|j|,|m| <= R} |K(j, m)|.

    This is the p = 1 case of :func:`specdet.lattice.nuclear_norm_estimate`
    and is monotone nondecreasing in the cutoff.
    """
    return nuclear_norm_estimate(k, 1.0, cutoff)


def schur_bound(k: LatticeKernel, p: float, cutoff: int) -> float:
    """Operator-norm bound from the discrete Schur test on the box:
    (max column sum)^(1/p) * (max row sum)^(1 - 1/p), rows indexed by the
    output variable of K(row, col)."""
    if cutoff < 1:
        raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
    if not (1.0 <= p):
        raise ParameterError(f"p must lie in [1, inf], got {p}")
    points = list(iter_box(k.dim, cutoff))
    row_sums = {pt: 0.0 for pt in points}
    col_sums = {pt: 0.0 for pt in points}
    if k.support_iter is not None:
        for j, m, v in k.support_iter(cutoff):
            row_sums[j] += abs(complex(v))
            col_sums[m] += abs(complex(v))
    else:
        side = len(points)
        if side * side > 4_000_000:
            raise FeasibilityError(
                f"Schur bound needs {side * side} kernel evaluations at cutoff "
                f"{cutoff} and the kernel declares no support iterator",
                count=side * side,
            )
        for j in points:
            for m in points:
                mag = abs(k.value(j, m))
                row_sums[j] += mag
                col_sums[m] += mag
    max_row = max(row_sums.values(), default=0.0)
    max_col = max(col_sums.values(), default=0.0)
    if math.isinf(p):
        return max_row
    inv_p = 1.0 / p
    return max_col ** inv_p * max_row ** (1.0 - inv_p)


def toroidal_determinant(s: ToroidalSymbol, lam: complex, order: int = 30,
                         cutoff: int = 8, tol: float = 1e-10) -> DetResult:
    """Determinant series applied to the quantization matrix of the symbol."""
    result = lattice_determinant(toroidal_matrix(s, cutoff), lam,
                                 order=order, cutoff=cutoff, tol=tol)
    if s.order >= -s.dim:
        result.diagnostics.setdefault("warnings", []).append(
            f"symbol order {s.order:g} is not below -{s.dim}; the summed-entry "
            f"norm may diverge as the cutoff grows"
        )
    return result


@dataclass
class NormGrowthProfile:
    """Norm partial sums across cutoffs with a growth verdict."""

    points: list  # (cutoff, norm) pairs
    increments: list
    verdict: str  # "converging" or "diverging/inconclusive"


def growth_verdict(points: Sequence[tuple]) -> NormGrowthProfile:
    """Classify a monotone norm profile by its increment ratios.

    "converging" when successive increments decay geometrically (every
    ratio below ``CONVERGENCE_RATIO``, or all increments negligible),
    "diverging/inconclusive" otherwise.  A profile with fewer than three
    cutoffs cannot exhibit a ratio and is inconclusive unless flat.
    """
    points = [(int(r), float(v)) for r, v in points]
    if not points:
        raise ParameterError("profile must contain at least one point")
    increments = [b[1] - a[1] for a, b in zip(points, points[1:])]
    scale = max(1.0, points[-1][1])
    flat = all(abs(inc) <= 1e-14 * scale for inc in increments)
    if flat:
        verdict = "converging"
    elif len(increments) >= 2:
        ratios = []
        for prev, cur in zip(increments, increments[1:]):
            if abs(prev) <= 1e-14 * scale:
                ratios.append(0.0 if abs(cur) <= 1e-14 * scale else math.inf)
            else:
                ratios.append(abs(cur) / abs(prev))
        verdict = "converging" if all(r < CONVERGENCE_RATIO for r in ratios) \
            else "diverging/inconclusive"
    else:
        verdict = "diverging/inconclusive"
    return NormGrowthProfile(points=points, increments=increments, verdict=verdict)


def norm_growth_profile(s: ToroidalSymbol, cutoffs: Sequence[int]) -> NormGrowthProfile:
    """Poincare-norm partial sums of the quantization across ascending
    cutoffs, classified by :func:`growth_verdict`."""
    cutoffs = [int(r) for r in cutoffs]
    if not cutoffs:
        raise ParameterError("cutoff list must be nonempty")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])) or cutoffs[0] < 1:
        raise ParameterError(f"cutoffs must be ascending and >= 1, got {cutoffs}")
    points = []
    for r in cutoffs:
        points.append((r, poincare_norm(toroidal_matrix(s, r), r)))
    return growth_verdict(points)


# ---------------------------------------------------------------------------
# Built-in symbol families
# ---------------------------------------------------------------------------

def _k_norm_sq(k: Index) -> float:
    return float(sum(x * x for x in k))


def power_decay_symbol(order: float, dim: int = 1, amplitude: complex = 1.0,
                       label: str = "") -> ToroidalSymbol:
    """x-independent symbol c * (1 + |k|^2)^(order/2)."""
    amplitude = complex(amplitude)

    def eval_fn(x, k):
        return amplitude * (1.0 + _k_norm_sq(k)) ** (order / 2.0)

    return ToroidalSymbol(dim, order, eval_fn, x_independent=True,
                          label=label or f"power-decay({order:g})")


def sharpness_symbol(dim: int = 1, label: str = "") -> ToroidalSymbol:
    """The borderline symbol (1 + |k|)^(-dim) whose summed-entry norm
    diverges like the harmonic series; of every order >= -dim."""

    def eval_fn(x, k):
        return (1.0 + math.sqrt(_k_norm_sq(k))) ** (-dim) + 0.0j

    return ToroidalSymbol(dim, float(-dim), eval_fn, x_independent=True,
                          label=label or "sharpness")


def modulated_symbol(modes, decay_order: float, dim: int = 1,
                     amplitude: complex = 1.0, label: str = "") -> ToroidalSymbol:
    """Trigonometric polynomial in x times a power decay in k:
    sigma(x, k) = (sum_theta c_theta e^{2*pi*i*x.theta}) * c*(1+|k|^2)^(nu/2)."""
    amplitude = complex(amplitude)
    mode_table = {}
    for theta, c in dict(modes).items():
        theta = tuple(int(t) for t in (theta if isinstance(theta, (tuple, list)) else (theta,)))
        if len(theta) != dim:
            raise ParameterError(f"mode {theta} does not have dimension {dim}")
        mode_table[theta] = complex(c)
    x_indep = all(all(t == 0 for t in theta) for theta in mode_table)

    def eval_fn(x, k):
        osc = 0.0j
        for theta, c in mode_table.items():
            phase = sum(xi * ti for xi, ti in zip(x, theta))
            osc += c * cmath.exp(2j * math.pi * phase)
        return osc * amplitude * (1.0 + _k_norm_sq(k)) ** (decay_order / 2.0)

    return ToroidalSymbol(dim, decay_order, eval_fn, x_independent=x_indep,
                          label=label or "modulated")


def table_symbol(entries, dim: int = 1, order: float = 0.0,
                 label: str = "") -> ToroidalSymbol:
    """Symbol with explicitly listed Fourier coefficients sigma_hat(l, k);
    evaluates as the trig polynomial sum_l sigma_hat(l, k) e^{2*pi*i*x.l}."""
    table = {}
    for (l, k), v in dict(entries).items():
        l = tuple(int(t) for t in (l if isinstance(l, (tuple, list)) else (l,)))
        k = tuple(int(t) for t in (k if isinstance(k, (tuple, list)) else (k,)))
        if len(l) != dim or len(k) != dim:
            raise ParameterError(f"entry index ({l}, {k}) does not have dimension {dim}")
        table[(l, k)] = complex(v)
    x_indep = all(all(t == 0 for t in l) for l, _ in table)

    def eval_fn(x, k):
        acc = 0.0j
        for (l, kk), v in table.items():
            if kk == k:
                phase = sum(xi * li for xi, li in zip(x, l))
                acc += v * cmath.exp(2j * math.pi * phase)
        return acc

    return ToroidalSymbol(dim, order, eval_fn, x_independent=x_indep,
                          label=label or "coefficient-table")
