"""Shared data model, validation, and file parsing.

All types are immutable after construction and every operation is a pure
function, so values can be shared freely between threads.

Probability mass is checked against an absolute tolerance of 1e-9: inputs
within tolerance are renormalized, anything further off is rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import (
    DistributionError,
    EmptyError,
    ParamError,
    SchemaError,
    ShapeError,
)

PROB_TOL = 1e-9
# Below this, mass deviations are float noise: accept as-is so that
# parse(serialize(x)) reproduces x bit-for-bit.
RENORM_FLOOR = 1e-12

COLUMN_KINDS = ("categorical", "numeric")
COLUMN_ROLES = ("identifier", "quasi-identifier", "sensitive", "plain")


def _as_finite_float(x, what: str) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise SchemaError(f"{what}: not a number: {x!r}")
    if not math.isfinite(v):
        raise SchemaError(f"{what}: not finite: {x!r}")
    return v


# ---------------------------------------------------------------------------
# Distributions


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector over labeled outcomes."""

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise SchemaError("distribution needs at least one outcome")
        if len(self.labels) != len(self.probs):
            raise SchemaError(
                f"{len(self.labels)} labels vs {len(self.probs)} probabilities"
            )
        if len(set(self.labels)) != len(self.labels):
            raise SchemaError("outcome labels must be distinct")
        for p in self.probs:
            if not math.isfinite(p):
                raise DistributionError(f"non-finite probability {p!r}")
            if p < 0:
                raise DistributionError(f"negative probability {p!r}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        if abs(total - 1.0) > RENORM_FLOOR:
            object.__setattr__(
                self, "probs", tuple(p / total for p in self.probs)
            )

    @classmethod
    def from_probs(cls, probs: Sequence[float], labels: Sequence[str] | None = None):
        if labels is None:
            labels = [str(i) for i in range(len(probs))]
        return cls(tuple(str(s) for s in labels), tuple(float(p) for p in probs))

    @classmethod
    def uniform(cls, n: int):
        if n < 1:
            raise ParamError("uniform distribution needs n >= 1")
        return cls.from_probs([1.0 / n] * n)

    def prob_of(self, label: str) -> float:
        try:
            return self.probs[self.labels.index(label)]
        except ValueError:
            raise SchemaError(f"unknown outcome label {label!r}")

    def __len__(self) -> int:
        return len(self.labels)

    def to_json_dict(self) -> dict:
        return {"labels": list(self.labels), "probs": list(self.probs)}


def parse_distribution(text: str) -> DiscreteDistribution:
    """Parse the documented JSON shape ``{"labels": [...], "probs": [...]}``."""
    obj = _load_json(text, "distribution")
    if not isinstance(obj, dict) or set(obj) != {"labels", "probs"}:
        raise SchemaError('distribution file must be {"labels": [...], "probs": [...]}')
    labels, probs = obj["labels"], obj["probs"]
    if not isinstance(labels, list) or not isinstance(probs, list):
        raise SchemaError("labels and probs must be JSON arrays")
    pvals = []
    for p in probs:
        if not isinstance(p, (int, float)) or isinstance(p, bool):
            raise SchemaError(f"probability entries must be numbers, got {p!r}")
        pvals.append(float(p))
    return DiscreteDistribution(tuple(str(s) for s in labels), tuple(pvals))


@dataclass(frozen=True)
class JointDistribution:
    """p(x, y) over two finite alphabets; matrix rows follow ``x_labels``."""

    x_labels: tuple[str, ...]
    y_labels: tuple[str, ...]
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.x_labels or not self.y_labels:
            raise SchemaError("joint distribution needs non-empty alphabets")
        if len(set(self.x_labels)) != len(self.x_labels) or len(
            set(self.y_labels)
        ) != len(self.y_labels):
            raise SchemaError("labels must be distinct")
        if len(self.matrix) != len(self.x_labels):
            raise ShapeError("matrix row count must equal |x_labels|")
        for row in self.matrix:
            if len(row) != len(self.y_labels):
                raise ShapeError("matrix column count must equal |y_labels|")
            for v in row:
                if not math.isfinite(v) or v < 0:
                    raise DistributionError(f"invalid joint mass {v!r}")
        total = math.fsum(v for row in self.matrix for v in row)
        if abs(total - 1.0) > PROB_TOL:
            raise DistributionError(f"joint mass sums to {total!r}, not 1")
        if abs(total - 1.0) > RENORM_FLOOR:
            object.__setattr__(
                self,
                "matrix",
                tuple(tuple(v / total for v in row) for row in self.matrix),
            )

    def marginal_x(self) -> DiscreteDistribution:
        return DiscreteDistribution(
            self.x_labels, tuple(math.fsum(row) for row in self.matrix)
        )

    def marginal_y(self) -> DiscreteDistribution:
        cols = tuple(
            math.fsum(row[j] for row in self.matrix)
            for j in range(len(self.y_labels))
        )
        return DiscreteDistribution(self.y_labels, cols)

    def transpose(self) -> "JointDistribution":
        m = tuple(
            tuple(self.matrix[i][j] for i in range(len(self.x_labels)))
            for j in range(len(self.y_labels))
        )
        return JointDistribution(self.y_labels, self.x_labels, m)

    def to_json_dict(self) -> dict:
        return {
            "x_labels": list(self.x_labels),
            "y_labels": list(self.y_labels),
            "matrix": [list(r) for r in self.matrix],
        }


def parse_joint(text: str) -> JointDistribution:
    obj = _load_json(text, "joint distribution")
    keys = {"x_labels", "y_labels", "matrix"}
    if not isinstance(obj, dict) or set(obj) != keys:
        raise SchemaError(f"joint file must have keys {sorted(keys)}")
    matrix = _numeric_matrix(obj["matrix"], "joint matrix")
    return JointDistribution(
        tuple(str(s) for s in obj["x_labels"]),
        tuple(str(s) for s in obj["y_labels"]),
        matrix,
    )


@dataclass(frozen=True)
class FiniteMechanism:
    """Explicit conditional distribution P(output | input), one row per input."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: tuple[DiscreteDistribution, ...]

    def __post_init__(self):
        if not self.inputs:
            raise SchemaError("mechanism needs at least one input")
        if len(set(self.inputs)) != len(self.inputs):
            raise SchemaError("input labels must be distinct")
        if len(self.rows) != len(self.inputs):
            raise ShapeError("one output distribution per input required")
        for row in self.rows:
            if row.labels != self.outputs:
                raise ShapeError("all rows must share the output alphabet")

    @classmethod
    def from_matrix(
        cls,
        matrix: Sequence[Sequence[float]],
        inputs: Sequence[str] | None = None,
        outputs: Sequence[str] | None = None,
    ):
        if inputs is None:
            inputs = [str(i) for i in range(len(matrix))]
        if outputs is None:
            width = len(matrix[0]) if matrix else 0
            outputs = [str(j) for j in range(width)]
        out = tuple(str(s) for s in outputs)
        rows = tuple(
            DiscreteDistribution(out, tuple(float(v) for v in row)) for row in matrix
        )
        return cls(tuple(str(s) for s in inputs), out, rows)

    def row_for(self, input_id: str) -> DiscreteDistribution:
        try:
            return self.rows[self.inputs.index(input_id)]
        except ValueError:
            raise SchemaError(f"unknown input id {input_id!r}")

    def matrix(self) -> tuple[tuple[float, ...], ...]:
        return tuple(r.probs for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "matrix": [list(r.probs) for r in self.rows],
        }


def parse_mechanism(text: str) -> FiniteMechanism:
    obj = _load_json(text, "mechanism")
    keys = {"inputs", "outputs", "matrix"}
    if not isinstance(obj, dict) or set(obj) != keys:
        raise SchemaError(f"mechanism file must have keys {sorted(keys)}")
    matrix = _numeric_matrix(obj["matrix"], "mechanism matrix")
    return FiniteMechanism.from_matrix(matrix, obj["inputs"], obj["outputs"])


# ---------------------------------------------------------------------------
# Tables


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = "categorical"
    role: str = "plain"

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise SchemaError(f"unknown column kind {self.kind!r}")
        if self.role not in COLUMN_ROLES:
            raise SchemaError(f"unknown column role {self.role!r}")


Value = Union[str, float]


@dataclass(frozen=True)
class DataTable:
    """Rows of typed, role-tagged columns.

    Numeric cells are stored as finite floats; there is no missing-value
    support (blank or unparseable cells are rejected at parse time).
    """

    columns: tuple[Column, ...]
    rows: tuple[tuple[Value, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise EmptyError("table needs at least one row")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("column names must be distinct")
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ShapeError(
                    f"row width {len(r)} does not match {len(self.columns)} columns"
                )
        for j, col in enumerate(self.columns):
            if col.kind == "numeric":
                for r in self.rows:
                    if not isinstance(r[j], float) or not math.isfinite(r[j]):
                        raise SchemaError(
                            f"column {col.name!r} expects finite numbers, got {r[j]!r}"
                        )

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise SchemaError(f"unknown column {name!r}")

    def columns_with_role(self, role: str) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.columns) if c.role == role)

    def quasi_identifier_columns(self) -> tuple[int, ...]:
        return self.columns_with_role("quasi-identifier")

    def sensitive_column(self) -> int:
        idx = self.columns_with_role("sensitive")
        if len(idx) != 1:
            raise SchemaError(f"exactly one sensitive column required, found {len(idx)}")
        return idx[0]

    def column_values(self, index: int) -> tuple[Value, ...]:
        return tuple(r[index] for r in self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        """RFC-4180 CSV; numeric cells use repr so parsing is lossless."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([c.name for c in self.columns])
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_schema_dict(self) -> dict:
        return {
            "roles": {c.name: c.role for c in self.columns},
            "kinds": {c.name: c.kind for c in self.columns},
        }


def parse_table(csv_text: str, schema: dict) -> DataTable:
    """Parse an RFC-4180 CSV plus sidecar role/kind map into a DataTable.

    ``schema`` is ``{"roles": {column: role}, "kinds": {column: kind}}``;
    unmentioned columns default to plain categorical.
    """
    if not isinstance(schema, dict):
        raise SchemaError("schema sidecar must be a JSON object")
    roles = schema.get("roles", {})
    kinds = schema.get("kinds", {})
    if not isinstance(roles, dict) or not isinstance(kinds, dict):
        raise SchemaError('schema sidecar must be {"roles": {...}, "kinds": {...}}')

    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("CSV is empty")
    for col in list(roles) + list(kinds):
        if col not in header:
            raise SchemaError(f"schema mentions unknown column {col!r}")

    columns = tuple(
        Column(name, kinds.get(name, "categorical"), roles.get(name, "plain"))
        for name in header
    )
    rows = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw:
            continue  # blank line
        if len(raw) != len(header):
            raise ShapeError(f"line {lineno}: expected {len(header)} fields, got {len(raw)}")
        parsed: list[Value] = []
        for cell, col in zip(raw, columns):
            if col.kind == "numeric":
                parsed.append(_as_finite_float(cell, f"line {lineno}, column {col.name!r}"))
            else:
                parsed.append(cell)
        rows.append(tuple(parsed))
    return DataTable(columns, tuple(rows))


@dataclass(frozen=True)
class EquivalenceClass:
    """Rows sharing one full quasi-identifier tuple."""

    qi_key: tuple[Value, ...]
    row_indices: frozenset[int]

    def __post_init__(self):
        if not self.row_indices:
            raise EmptyError("equivalence class cannot be empty")

    def __len__(self) -> int:
        return len(self.row_indices)


def equivalence_classes(table: DataTable) -> tuple[EquivalenceClass, ...]:
    """Partition table rows by their full quasi-identifier tuple.

    Classes come back in first-appearance order and always cover every row
    exactly once.
    """
    qi = table.quasi_identifier_columns()
    if not qi:
        raise SchemaError("table has no quasi-identifier columns")
    groups: dict[tuple[Value, ...], list[int]] = {}
    for i, row in enumerate(table.rows):
        key = tuple(row[j] for j in qi)
        groups.setdefault(key, []).append(i)
    return tuple(
        EquivalenceClass(key, frozenset(idx)) for key, idx in groups.items()
    )


# ---------------------------------------------------------------------------
# Traces and regions


@dataclass(frozen=True)
class Trace:
    """Time-ordered samples; each value holds until the next timestamp."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.samples:
            raise EmptyError("trace needs at least one sample")
        prev = None
        for t, v in self.samples:
            if not (math.isfinite(t) and math.isfinite(v)):
                raise SchemaError("trace entries must be finite")
            if prev is not None and t <= prev:
                raise SchemaError("timestamps must be strictly increasing")
            prev = t

    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.samples)

    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.samples)

    def to_json_dict(self) -> dict:
        return {"samples": [{"t": t, "v": v} for t, v in self.samples]}


def parse_trace(text: str) -> Trace:
    obj = _load_json(text, "trace")
    if not isinstance(obj, dict) or set(obj) != {"samples"}:
        raise SchemaError('trace file must be {"samples": [{"t": ..., "v": ...}, ...]}')
    samples = []
    for entry in obj["samples"]:
        if not isinstance(entry, dict) or set(entry) != {"t", "v"}:
            raise SchemaError('each trace sample must be {"t": ..., "v": ...}')
        samples.append(
            (
                _as_finite_float(entry["t"], "trace timestamp"),
                _as_finite_float(entry["v"], "trace value"),
            )
        )
    return Trace(tuple(samples))


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle or a set of unit grid cells."""

    rect: tuple[float, float, float, float] | None = None
    cells: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if (self.rect is None) == (not self.cells):
            raise ParamError("region must be a rectangle or a non-empty cell set")
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            if not all(math.isfinite(v) for v in self.rect):
                raise ParamError("rectangle coordinates must be finite")
            if x1 <= x0 or y1 <= y0:
                raise ParamError("rectangle must have positive extent")

    @property
    def is_rect(self) -> bool:
        return self.rect is not None

    def area(self) -> float:
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            return (x1 - x0) * (y1 - y0)
        return float(len(self.cells))

    def to_json_dict(self) -> dict:
        if self.rect is not None:
            return {"rect": list(self.rect)}
        return {"cells": [list(c) for c in sorted(self.cells)]}


def parse_region(text: str) -> Region:
    obj = _load_json(text, "region")
    if isinstance(obj, dict) and set(obj) == {"rect"}:
        rect = obj["rect"]
        if not isinstance(rect, list) or len(rect) != 4:
            raise SchemaError("rect must be [x_min, y_min, x_max, y_max]")
        return Region(rect=tuple(_as_finite_float(v, "rect coordinate") for v in rect))
    if isinstance(obj, dict) and set(obj) == {"cells"}:
        cells = set()
        for cell in obj["cells"]:
            if not isinstance(cell, list) or len(cell) != 2:
                raise SchemaError("cells must be [i, j] pairs")
            cells.add((int(cell[0]), int(cell[1])))
        return Region(cells=frozenset(cells))
    raise SchemaError('region file must be {"rect": [...]} or {"cells": [...]}')


# ---------------------------------------------------------------------------
# Metric values


UNITS = (
    "bits",
    "probability",
    "count",
    "seconds",
    "ratio",
    "dimensionless",
    "boolean",
    "enum",
)


@dataclass(frozen=True)
class MetricValue:
    """One computed metric result, tagged with its unit.

    ``value`` is a real, boolean, enum string, or a record of named fields.
    ``out_of_range`` is set when the value provably falls outside the
    catalog's declared range for the metric (the raw value is kept).
    """

    metric_id: str
    value: Union[float, bool, str, dict]
    unit: str
    out_of_range: bool = False

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ParamError(f"unknown unit {self.unit!r}")

    def to_json_dict(self) -> dict:
        return {
            "metric": self.metric_id,
            "value": jsonable(self.value),
            "unit": self.unit,
            "out_of_range": self.out_of_range,
        }


def jsonable(value):
    """Make a metric value strict-JSON safe (non-finite floats to strings)."""
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return value


# ---------------------------------------------------------------------------
# Helpers


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed {what} JSON: {exc}")


def _numeric_matrix(obj, what: str) -> tuple[tuple[float, ...], ...]:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{what} must be a non-empty array of arrays")
    rows = []
    for row in obj:
        if not isinstance(row, list):
            raise SchemaError(f"{what} must be a non-empty array of arrays")
        vals = []
        for v in row:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise SchemaError(f"{what} entries must be numbers, got {v!r}")
            vals.append(float(v))
        rows.append(tuple(vals))
    return tuple(rows)
