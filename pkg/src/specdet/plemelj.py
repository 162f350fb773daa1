"""Representation-agnostic determinant series evaluator.

Given the trace powers m -> Tr(T^m) of an operator, the determinant of
I + lambda*T is evaluated as

    Det(I + lambda*T) = exp( sum_{m>=1} ((-1)^(m+1)/m) * Tr(T^m) * lambda^m ),

valid for |lambda| inside the series disc.  The engine consumes trace powers
rather than operators, so every concrete representation (lattice kernels,
toroidal symbols, block symbols, spectral models, bundle symbols) adapts
itself to a :class:`TracePowerSource` and shares one tested implementation.

The exponential of the partial log-series is used directly; no complex
logarithm of a product is ever taken, so there is no branch ambiguity.

Sources may serve trace_power queries for distinct orders concurrently;
term assembly itself is sequential in the order index.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import EvaluationError, ParameterError

__all__ = ["TracePowerSource", "DetResult", "plemelj_det", "radius_estimate"]

#: consecutive below-tolerance terms required before the series stops early;
#: a single small term can be an alternating-series zero crossing.
EARLY_STOP_RUN = 3

#: largest real part exp() can take without overflowing a double
_EXP_OVERFLOW = 709.0


@dataclass
class TracePowerSource:
    """Trace powers m -> Tr(T^m) of some operator, plus optional metadata.

    ``trace_power`` must be deterministic.  ``norm_hint`` is an optional
    upper bound h on a trace norm of T; queried values are sanity-checked
    against h^m and violations are reported as diagnostics, never errors,
    since the hint is advisory.
    """

    trace_power: Callable[[int], complex]
    norm_hint: float | None = None
    label: str = ""


@dataclass
class DetResult:
    """Determinant value with per-order series terms and diagnostics.

    ``terms[i]`` is the order-(i+1) contribution
    ((-1)^(m+1)/m) * lambda^m * Tr(T^m) and ``value`` equals
    exp(sum(terms)).  ``converged`` is the ratio-test verdict described in
    :func:`plemelj_det`; ``tail_estimate`` is the geometric extrapolation of
    the unsummed tail (infinite when the ratio test fails).
    """

    value: complex
    terms: tuple
    order_used: int
    cutoff_used: int | None
    tail_estimate: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def _exceeds_hint(magnitude: float, hint: float, m: int) -> bool:
    """|Tr(T^m)| > hint^m within slack, compared in the log domain so large
    orders cannot overflow."""
    if magnitude == 0.0:
        return False
    if hint <= 0.0:
        return True
    return math.log(magnitude) > m * math.log(hint) + 1e-9


def plemelj_det(src: TracePowerSource, lam: complex, order: int = 30,
                tol: float = 1e-10) -> DetResult:
    """Evaluate the determinant series from a trace-power source.

    Terms are accumulated in ascending order m = 1..order.  The loop stops
    early once ``EARLY_STOP_RUN`` consecutive terms fall below
    tol*max(1, |partial sum|).  Afterwards, with t the last two terms and
    rho = |t_M / t_{M-1}|, the tail estimate is |t_M|*rho/(1-rho) when
    rho < 1 (infinite otherwise) and ``converged`` requires either the
    early stop or rho < 1 together with a below-tolerance last term.
    """
    if order < 1:
        raise ParameterError(f"series order must be >= 1, got {order}")
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    lam = complex(lam)
    diagnostics: dict = {}
    hint_violations: list[int] = []

    terms: list[complex] = []
    total = 0.0j
    lam_pow = 1.0 + 0.0j
    small_run = 0
    early_stopped = False
    for m in range(1, order + 1):
        tp = complex(src.trace_power(m))
        if not cmath.isfinite(tp):
            raise EvaluationError(
                f"trace power of order {m} is non-finite ({tp!r})"
                + (f" for source {src.label!r}" if src.label else "")
            )
        if src.norm_hint is not None and _exceeds_hint(abs(tp), src.norm_hint, m):
            hint_violations.append(m)
        lam_pow *= lam
        sign = 1.0 if m % 2 == 1 else -1.0
        t = (sign / m) * lam_pow * tp
        terms.append(t)
        total += t
        if abs(t) < tol * max(1.0, abs(total)):
            small_run += 1
            if small_run >= EARLY_STOP_RUN:
                early_stopped = True
                break
        else:
            small_run = 0

    order_used = len(terms)
    last = abs(terms[-1])
    if order_used >= 2:
        prev = abs(terms[-2])
        if prev > 0.0:
            rho = last / prev
        else:
            rho = 0.0 if last == 0.0 else math.inf
    else:
        rho = 0.0 if last == 0.0 else math.inf

    if last == 0.0:
        tail = 0.0
    elif rho < 1.0:
        tail = last * rho / (1.0 - rho)
    elif early_stopped:
        tail = last
    else:
        tail = math.inf

    last_small = last <= tol * max(1.0, abs(total))
    converged = early_stopped or (rho < 1.0 and last_small)

    if hint_violations:
        diagnostics["norm_hint_violations"] = hint_violations
        diagnostics.setdefault("warnings", []).append(
            f"trace powers exceeded norm_hint^m at orders {hint_violations[:5]}"
        )

    if total.real > _EXP_OVERFLOW:
        # far outside the series disc: exp of the partial log-sum exceeds
        # the float range, so report the divergence instead of crashing
        value = complex(math.inf, 0.0)
        converged = False
        diagnostics.setdefault("warnings", []).append(
            f"partial log-series sum {total.real:.3g} overflows exp; the "
            f"series is divergent at this lambda"
        )
    else:
        value = cmath.exp(total)

    return DetResult(
        value=value,
        terms=tuple(terms),
        order_used=order_used,
        cutoff_used=None,
        tail_estimate=tail,
        converged=converged,
        diagnostics=diagnostics,
    )


def radius_estimate(src: TracePowerSource, order: int) -> float:
    """Root-test estimate of the series convergence radius.

    Samples |Tr(T^m)|^(1/m) for m in {ceil(order/2)..order} and returns the
    reciprocal of the largest sample (a limsup estimate).  Returns infinity
    when every sampled trace is zero.  This is a numerical diagnostic: the
    true disc radius is whatever the operator's spectrum dictates.
    """
    if order < 3:
        raise ParameterError(f"radius estimate needs order >= 3, got {order}")
    start = (order + 1) // 2
    worst = 0.0
    for m in range(start, order + 1):
        tp = complex(src.trace_power(m))
        if not cmath.isfinite(tp):
            raise EvaluationError(f"trace power of order {m} is non-finite ({tp!r})")
        mag = abs(tp)
        if mag > 0.0:
            worst = max(worst, mag ** (1.0 / m))
    if worst == 0.0:
        return math.inf
    return 1.0 / worst
