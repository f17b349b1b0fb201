"""Serialization of reports, tables and distance curves to JSON and CSV.

JSON output is canonical: keys sorted, no whitespace between tokens, floats
printed in the shortest form that parses back to the same double.  CSV uses
a fixed header per payload kind, comma separators and bare ``\\n`` line ends.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .geometry import LatitudeKernel

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "CurveSample",
    "OutputDocument",
    "emit_curve",
    "report_document",
    "oracle_document",
    "table_document",
    "curve_document",
    "dumps",
    "loads",
    "write_json",
    "write_csv",
]

SCHEMA_VERSION = "1"

CSV_COLUMNS = {
    "error": ("model", "N_total", "n_codes", "phi0", "error"),
    "quantize": ("circle", "start", "size", "midpoint", "distortion"),
    "oracle": ("method", "N_total", "n_codes", "phi0", "error", "iterations"),
    "table": ("phi0", "cos2phi0", "V_exact", "V_asymptotic", "reduction_pct", "reduction_exact_pct"),
    "curve": ("phi", "dtheta", "sigma"),
}


@dataclass(frozen=True)
class CurveSample:
    phi: float
    dtheta: float
    sigma: float


@dataclass
class OutputDocument:
    """One serializable result.

    ``kind`` names the payload shape (``error``, ``quantize``, ``oracle``,
    ``table``, ``curve`` or ``verify``).
    """

    kind: str
    payload: object
    metadata: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "payload": _plain(self.payload),
            "metadata": _plain(self.metadata),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        return cls(data["kind"], data["payload"], data.get("metadata", {}), data["schema_version"])


def _plain(obj):
    """Convert numpy scalars, enums, tuples and dataclasses to JSON types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, CurveSample):
        return {"phi": obj.phi, "dtheta": obj.dtheta, "sigma": obj.sigma}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def emit_curve(phis, samples):
    """Sample ``sigma(phi, dtheta)`` on ``samples`` evenly spaced ``dtheta`` in [0, pi]."""
    if int(samples) != samples or samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples!r}")
    dtheta = np.linspace(0.0, np.pi, int(samples))
    out = []
    for phi in phis:
        values = LatitudeKernel(phi).sigma(dtheta)
        out.extend(CurveSample(float(phi), float(d), float(s)) for d, s in zip(dtheta, values))
    return out


def _base_meta(**extra):
    meta = {"tool_version": __version__}
    meta.update(extra)
    return meta


def _model_meta(spec):
    return {
        "model": spec.kind.value,
        "N_total": spec.N_total,
        "n_codes": spec.n_codes,
        "phi0": spec.phi0,
    }


def report_document(report, include_layout=False):
    """Wrap a model :class:`~sphquant.models.DistortionReport`.

    With ``include_layout`` the document kind is ``quantize`` and carries the
    codebook and per-block statistics; otherwise it is ``error``.
    """
    payload = dict(_model_meta(report.model), error=report.error)
    if include_layout:
        payload["codebook"] = [
            {"longitude": t, "circle": c.value} for t, c in report.codebook.entries()
        ]
        payload["per_block"] = [
            {"circle": b.circle, "start": b.start, "size": b.size,
             "midpoint": b.midpoint, "distortion": b.distortion}
            for b in report.per_block
        ]
    meta = _base_meta(method="closed-form", **_model_meta(report.model))
    meta.update(report.metadata)
    return OutputDocument("quantize" if include_layout else "error", payload, meta)


def oracle_document(result, N_total, n_codes, phi0, **extra):
    """Wrap an :class:`~sphquant.oracle.OracleResult`."""
    layout = result.layout
    if hasattr(layout, "sizes"):
        layout = {"sizes": list(layout.sizes), "start_index": layout.start_index}
    else:
        layout = {"labels": list(layout)}
    payload = {
        "method": result.method,
        "N_total": N_total,
        "n_codes": n_codes,
        "phi0": phi0,
        "error": result.error,
        "iterations": result.iterations,
        "layout": layout,
        "codebook": [{"longitude": t, "circle": c.value} for t, c in result.codebook.entries()],
    }
    meta = _base_meta(method=result.method, N_total=N_total, n_codes=n_codes, phi0=phi0)
    meta.update({k: v for k, v in result.metadata.items() if k != "history"})
    meta.update(extra)
    return OutputDocument("oracle", payload, meta)


def table_document(rows, N, n):
    return OutputDocument("table", list(rows), _base_meta(model="one-circle", N_total=N, n_codes=n))


def curve_document(samples, phis, count):
    return OutputDocument("curve", list(samples), _base_meta(phis=list(phis), samples=count))


def dumps(doc):
    """Canonical JSON text of ``doc`` (with a trailing newline)."""
    return json.dumps(doc.to_dict(), sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def loads(text):
    return OutputDocument.from_dict(json.loads(text))


def write_json(doc, destination):
    destination.write(dumps(doc))


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(_plain(value))


def _rows(doc):
    payload = _plain(doc.payload)
    if doc.kind in ("error", "oracle"):
        return [payload]
    if doc.kind == "quantize":
        return payload["per_block"]
    return payload


def write_csv(doc, destination):
    """Header plus one row per record; only tabular kinds are accepted."""
    if doc.kind not in CSV_COLUMNS:
        raise ValueError(f"payload kind {doc.kind!r} has no tabular form")
    columns = CSV_COLUMNS[doc.kind]
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(columns)
    for row in _rows(doc):
        writer.writerow([_cell(row[c]) for c in columns])
