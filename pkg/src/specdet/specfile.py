"""Operator spec files: one self-describing JSON format for all five kinds.

A spec file is a single JSON object with a ``kind`` field selecting the
representation (lattice_kernel, toroidal_symbol, block_symbol,
spectral_model, bundle_symbol) and kind-specific fields.  Complex numbers
are two-element arrays [re, im].  Unknown fields are rejected and every
validation error names the offending field, so a bad file fails at parse
time rather than mid-computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .bundles import BundleSymbol, DualObject
from .errors import SpecParseError, SpecValidationError
from .invariant import BlockSymbol, SpectralModel, circle_model, sphere2_model, torus2_model
from .lattice import (
    LatticeKernel,
    banded_kernel,
    diagonal_kernel,
    rank_one_kernel,
    table_kernel,
)
from .linalg import CMatrix
from .toroidal import (
    ToroidalSymbol,
    modulated_symbol,
    power_decay_symbol,
    sharpness_symbol,
    table_symbol,
)

__all__ = ["OperatorSpec", "parse_spec", "parse_spec_text", "emit_spec", "build_operator"]

KINDS = ("lattice_kernel", "toroidal_symbol", "block_symbol",
         "spectral_model", "bundle_symbol")


@dataclass
class OperatorSpec:
    """Validated, normalized contents of a spec file."""

    kind: str
    params: dict = field(default_factory=dict)
    label: str | None = None


def _fail(message: str, fld: str | None = None):
    raise SpecValidationError(
        message if fld is None else f"{fld}: {message}", field=fld
    )


def _as_int(value, fld: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"expected an integer, got {value!r}", fld)
    return value


def _as_number(value, fld: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"expected a number, got {value!r}", fld)
    value = float(value)
    if not math.isfinite(value):
        _fail(f"expected a finite number, got {value!r}", fld)
    return value


def _as_pair(value, fld: str) -> list:
    """Normalize a complex field: plain number or [re, im]."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [_as_number(value, fld), 0.0]
    if isinstance(value, list) and len(value) == 2:
        return [_as_number(value[0], f"{fld}[0]"), _as_number(value[1], f"{fld}[1]")]
    _fail(f"expected a number or [re, im] pair, got {value!r}", fld)


def _as_entry_list(value, fld: str, index_slots: int) -> list:
    """Normalize a list of [idx..., re, im] records."""
    if not isinstance(value, list):
        _fail(f"expected a list, got {value!r}", fld)
    out = []
    for n, rec in enumerate(value):
        here = f"{fld}[{n}]"
        if not isinstance(rec, list) or len(rec) != index_slots + 2:
            _fail(f"expected [{'index, ' * index_slots}re, im], got {rec!r}", here)
        idx = [_as_int(rec[s], f"{here}[{s}]") for s in range(index_slots)]
        re = _as_number(rec[index_slots], f"{here}[{index_slots}]")
        im = _as_number(rec[index_slots + 1], f"{here}[{index_slots + 1}]")
        out.append(idx + [re, im])
    return out


def _as_matrix(value, fld: str) -> list:
    """Normalize a matrix: list of rows of [re, im] pairs."""
    if not isinstance(value, list) or not value:
        _fail(f"expected a nonempty list of rows, got {value!r}", fld)
    rows = []
    width = None
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            _fail(f"expected a nonempty row, got {row!r}", f"{fld}[{i}]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            _fail(f"row has {len(row)} entries, expected {width}", f"{fld}[{i}]")
        rows.append([_as_pair(z, f"{fld}[{i}][{j}]") for j, z in enumerate(row)])
    return rows


def _check_keys(obj: dict, allowed: set, context: str):
    for key in obj:
        if key not in allowed:
            _fail(f"unknown field in {context} (allowed: {sorted(allowed)})", key)


def _require(obj: dict, fld: str):
    if fld not in obj:
        _fail("required field is missing", fld)
    return obj[fld]


def _validate_lattice(obj: dict) -> dict:
    family = _require(obj, "family")
    families = {
        "diagonal": {"entries"},
        "rank_one": {"g", "h"},
        "banded": {"offsets", "support"},
        "table": {"entries"},
    }
    if family not in families:
        _fail(f"unknown family {family!r} (have {sorted(families)})", "family")
    _check_keys(obj, {"kind", "label", "family", "dim"} | families[family],
                f"lattice_kernel family {family!r}")
    dim = _as_int(obj.get("dim", 1), "dim")
    if dim != 1:
        _fail("built-in lattice families are one-dimensional", "dim")
    params = {"family": family, "dim": dim}
    if family == "diagonal":
        params["entries"] = _as_entry_list(_require(obj, "entries"), "entries", 1)
    elif family == "rank_one":
        params["g"] = _as_entry_list(_require(obj, "g"), "g", 1)
        params["h"] = _as_entry_list(_require(obj, "h"), "h", 1)
    elif family == "banded":
        params["offsets"] = _as_entry_list(_require(obj, "offsets"), "offsets", 1)
        support = _as_int(_require(obj, "support"), "support")
        if support < 0:
            _fail("support must be >= 0", "support")
        params["support"] = support
    else:
        params["entries"] = _as_entry_list(_require(obj, "entries"), "entries", 2)
    return params


def _validate_toroidal(obj: dict) -> dict:
    family = _require(obj, "family")
    families = {
        "power_decay": {"order", "amplitude"},
        "sharpness": set(),
        "modulated": {"modes", "decay_order", "amplitude"},
        "custom_table": {"entries", "order"},
    }
    if family not in families:
        _fail(f"unknown family {family!r} (have {sorted(families)})", "family")
    _check_keys(obj, {"kind", "label", "family", "dim", "x_grid"} | families[family],
                f"toroidal_symbol family {family!r}")
    dim = _as_int(obj.get("dim", 1), "dim")
    if dim < 1:
        _fail("dim must be >= 1", "dim")
    params = {"family": family, "dim": dim}
    if "x_grid" in obj:
        x_grid = _as_int(obj["x_grid"], "x_grid")
        if x_grid < 2:
            _fail("x_grid must be >= 2", "x_grid")
        params["x_grid"] = x_grid
    if family == "power_decay":
        params["order"] = _as_number(_require(obj, "order"), "order")
        params["amplitude"] = _as_pair(obj.get("amplitude", 1.0), "amplitude")
    elif family == "modulated":
        params["modes"] = _as_entry_list(_require(obj, "modes"), "modes", dim)
        params["decay_order"] = _as_number(_require(obj, "decay_order"), "decay_order")
        params["amplitude"] = _as_pair(obj.get("amplitude", 1.0), "amplitude")
    elif family == "custom_table":
        params["entries"] = _as_entry_list(_require(obj, "entries"), "entries", 2 * dim)
        params["order"] = _as_number(obj.get("order", 0.0), "order")
    return params


def _validate_block(obj: dict) -> dict:
    _check_keys(obj, {"kind", "label", "blocks", "dims"}, "block_symbol")
    raw_blocks = _require(obj, "blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        _fail("expected a nonempty list of matrices", "blocks")
    blocks = []
    for l, raw in enumerate(raw_blocks):
        matrix = _as_matrix(raw, f"block[{l}]")
        if len(matrix) != len(matrix[0]):
            _fail(f"matrix is {len(matrix)}x{len(matrix[0])}, must be square",
                  f"block[{l}]")
        blocks.append(matrix)
    params = {"blocks": blocks}
    if "dims" in obj:
        dims = obj["dims"]
        if not isinstance(dims, list):
            _fail(f"expected a list of sizes, got {dims!r}", "dims")
        if len(dims) != len(blocks):
            _fail(f"{len(dims)} sizes for {len(blocks)} blocks", "dims")
        for l, d in enumerate(dims):
            d = _as_int(d, f"dims[{l}]")
            if d != len(blocks[l]):
                _fail(f"dims[{l}]={d} does not match matrix side {len(blocks[l])}",
                      f"block[{l}]")
        params["dims"] = [int(d) for d in dims]
    return params


def _validate_spectral(obj: dict) -> dict:
    model = _require(obj, "model")
    models = {
        "circle": {"J"},
        "torus2": {"J"},
        "sphere2": {"J"},
        "table": {"eigenvalues", "multiplicities"},
    }
    if model not in models:
        _fail(f"unknown model {model!r} (have {sorted(models)})", "model")
    _check_keys(obj, {"kind", "label", "model", "alpha", "nu", "manifold_dim"}
                | models[model], f"spectral_model {model!r}")
    params = {"model": model}
    alpha = _as_number(_require(obj, "alpha"), "alpha")
    if not alpha > 0:
        _fail("alpha must be positive", "alpha")
    params["alpha"] = alpha
    nu = _as_number(obj.get("nu", 2.0), "nu")
    if not nu > 0:
        _fail("nu must be positive", "nu")
    params["nu"] = nu
    if "manifold_dim" in obj:
        md = _as_int(obj["manifold_dim"], "manifold_dim")
        if md < 1:
            _fail("manifold_dim must be >= 1", "manifold_dim")
        params["manifold_dim"] = md
    if model == "table":
        eig = _require(obj, "eigenvalues")
        mult = _require(obj, "multiplicities")
        if not isinstance(eig, list) or not eig:
            _fail("expected a nonempty list", "eigenvalues")
        if not isinstance(mult, list) or len(mult) != len(eig):
            _fail(f"expected {len(eig)} multiplicities", "multiplicities")
        values = [_as_number(v, f"eigenvalues[{j}]") for j, v in enumerate(eig)]
        for j, v in enumerate(values):
            if v < 0:
                _fail("eigenvalues must be nonnegative", f"eigenvalues[{j}]")
        counts = [_as_int(d, f"multiplicities[{j}]") for j, d in enumerate(mult)]
        for j, d in enumerate(counts):
            if d < 1:
                _fail("multiplicities must be >= 1", f"multiplicities[{j}]")
        params["eigenvalues"] = values
        params["multiplicities"] = counts
    else:
        J = _as_int(_require(obj, "J"), "J")
        if J < 0:
            _fail("J must be >= 0", "J")
        params["J"] = J
    return params


def _validate_bundle(obj: dict) -> dict:
    _check_keys(obj, {"kind", "label", "fiber_dim", "dual", "sigma"}, "bundle_symbol")
    fiber_dim = _as_int(_require(obj, "fiber_dim"), "fiber_dim")
    if fiber_dim < 1:
        _fail("fiber_dim must be >= 1", "fiber_dim")
    raw_dual = _require(obj, "dual")
    if not isinstance(raw_dual, list) or not raw_dual:
        _fail("expected a nonempty list of [id, dim] pairs", "dual")
    dual = []
    seen = set()
    for n, rec in enumerate(raw_dual):
        here = f"dual[{n}]"
        if not isinstance(rec, list) or len(rec) != 2 or not isinstance(rec[0], str):
            _fail(f"expected [id, dim], got {rec!r}", here)
        d = _as_int(rec[1], f"{here}[1]")
        if d < 1:
            _fail("block dimension must be >= 1", f"{here}[1]")
        if rec[0] in seen:
            _fail(f"duplicate dual id {rec[0]!r}", here)
        seen.add(rec[0])
        dual.append([rec[0], d])
    dims = dict(dual)
    raw_sigma = _require(obj, "sigma")
    if not isinstance(raw_sigma, list):
        _fail(f"expected a list of [i, r, xi, matrix] records, got {raw_sigma!r}",
              "sigma")
    sigma = []
    seen_keys = set()
    for n, rec in enumerate(raw_sigma):
        here = f"sigma[{n}]"
        if not isinstance(rec, list) or len(rec) != 4 or not isinstance(rec[2], str):
            _fail(f"expected [i, r, xi, matrix], got {rec!r}", here)
        i = _as_int(rec[0], f"{here}[0]")
        r = _as_int(rec[1], f"{here}[1]")
        xi = rec[2]
        if not (1 <= i <= fiber_dim and 1 <= r <= fiber_dim):
            _fail(f"fiber indices ({i}, {r}) outside 1..{fiber_dim}", here)
        if xi not in dims:
            _fail(f"unknown dual id {xi!r}", here)
        matrix = _as_matrix(rec[3], f"{here}[3]")
        if len(matrix) != dims[xi] or len(matrix[0]) != dims[xi]:
            _fail(f"matrix is {len(matrix)}x{len(matrix[0])}, expected "
                  f"{dims[xi]}x{dims[xi]} for block {xi!r}", here)
        if (i, r, xi) in seen_keys:
            _fail(f"duplicate sigma entry for ({i}, {r}, {xi!r})", here)
        seen_keys.add((i, r, xi))
        sigma.append([i, r, xi, matrix])
    return {"fiber_dim": fiber_dim, "dual": dual, "sigma": sigma}


_VALIDATORS = {
    "lattice_kernel": _validate_lattice,
    "toroidal_symbol": _validate_toroidal,
    "block_symbol": _validate_block,
    "spectral_model": _validate_spectral,
    "bundle_symbol": _validate_bundle,
}


def parse_spec_text(text: str) -> OperatorSpec:
    """Parse and validate a spec from JSON text."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno, column=exc.colno,
        ) from exc
    if not isinstance(obj, dict):
        _fail("spec file must hold a JSON object", "kind")
    kind = obj.get("kind")
    if kind not in KINDS:
        _fail(f"expected one of {list(KINDS)}, got {kind!r}", "kind")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        _fail(f"expected a string, got {label!r}", "label")
    params = _VALIDATORS[kind](obj)
    return OperatorSpec(kind=kind, params=params, label=label)


def parse_spec(path) -> OperatorSpec:
    """Parse and validate a spec file from disk."""
    return parse_spec_text(Path(path).read_text(encoding="utf-8"))


def emit_spec(spec: OperatorSpec) -> str:
    """Serialize a spec back to canonical JSON (reparses to an equal spec)."""
    obj = {"kind": spec.kind, **spec.params}
    if spec.label is not None:
        obj["label"] = spec.label
    return json.dumps(obj, sort_keys=True)


def _complex(pair) -> complex:
    return complex(pair[0], pair[1])


def build_operator(spec: OperatorSpec):
    """Instantiate the domain object a validated spec describes."""
    p = spec.params
    label = spec.label or ""
    if spec.kind == "lattice_kernel":
        return _build_lattice(p, label)
    if spec.kind == "toroidal_symbol":
        return _build_toroidal(p, label)
    if spec.kind == "block_symbol":
        blocks = tuple(
            CMatrix.from_rows([[_complex(z) for z in row] for row in matrix])
            for matrix in p["blocks"]
        )
        return BlockSymbol(blocks, label=label)
    if spec.kind == "spectral_model":
        return _build_spectral(p, label)
    if spec.kind == "bundle_symbol":
        dual = DualObject(tuple((i, d) for i, d in p["dual"]), label=label)
        entries = {}
        for i, r, xi, matrix in p["sigma"]:
            entries[(i, r, xi)] = CMatrix.from_rows(
                [[_complex(z) for z in row] for row in matrix]
            )
        return BundleSymbol.from_entries(p["fiber_dim"], dual, entries, label=label)
    raise SpecValidationError(f"unsupported kind {spec.kind!r}", field="kind")


def _build_lattice(p: dict, label: str) -> LatticeKernel:
    family = p["family"]
    if family == "diagonal":
        entries = {rec[0]: complex(rec[1], rec[2]) for rec in p["entries"]}
        return diagonal_kernel(entries, dim=p["dim"], label=label or "diagonal")
    if family == "rank_one":
        g = {rec[0]: complex(rec[1], rec[2]) for rec in p["g"]}
        h = {rec[0]: complex(rec[1], rec[2]) for rec in p["h"]}
        return rank_one_kernel(g, h, dim=p["dim"], label=label or "rank-one")
    if family == "banded":
        offsets = {rec[0]: complex(rec[1], rec[2]) for rec in p["offsets"]}
        return banded_kernel(offsets, p["support"], dim=p["dim"],
                             label=label or "banded")
    entries = {(rec[0], rec[1]): complex(rec[2], rec[3]) for rec in p["entries"]}
    return table_kernel(entries, dim=p["dim"], label=label or "table")


def _build_toroidal(p: dict, label: str) -> ToroidalSymbol:
    family = p["family"]
    dim = p["dim"]
    if family == "power_decay":
        sym = power_decay_symbol(p["order"], dim=dim,
                                 amplitude=_complex(p["amplitude"]),
                                 label=label)
    elif family == "sharpness":
        sym = sharpness_symbol(dim=dim, label=label)
    elif family == "modulated":
        modes = {tuple(rec[:dim]) if dim > 1 else rec[0]: complex(rec[dim], rec[dim + 1])
                 for rec in p["modes"]}
        sym = modulated_symbol(modes, p["decay_order"], dim=dim,
                               amplitude=_complex(p["amplitude"]), label=label)
    else:
        entries = {}
        for rec in p["entries"]:
            l = tuple(rec[:dim]) if dim > 1 else rec[dim - 1]
            k = tuple(rec[dim:2 * dim]) if dim > 1 else rec[2 * dim - 1]
            entries[(l, k)] = complex(rec[2 * dim], rec[2 * dim + 1])
        sym = table_symbol(entries, dim=dim, order=p["order"], label=label)
    if "x_grid" in p:
        sym.x_grid = p["x_grid"]
    return sym


def _build_spectral(p: dict, label: str) -> SpectralModel:
    model = p["model"]
    if model == "circle":
        return circle_model(p["J"], nu=p["nu"], label=label or "circle")
    if model == "sphere2":
        return sphere2_model(p["J"], nu=p["nu"], label=label or "sphere2")
    if model == "torus2":
        return torus2_model(p["J"], nu=p["nu"], label=label or "torus2")
    return SpectralModel(p["eigenvalues"], p["multiplicities"], p["nu"],
                         label=label or "table")
