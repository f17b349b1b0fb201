import io
import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphquant import models, oracle, report
from sphquant.cli import run
from sphquant.engine import GridSpec
from sphquant.geometry import sigma

GOLDEN = Path(__file__).parent / "golden"


def cli_text(*argv):
    out, err = io.StringIO(), io.StringIO()
    assert run(list(argv), out, err) == 0, err.getvalue()
    return out.getvalue()


def test_curve_equator_is_identity():
    samples = report.emit_curve([0.0], 50)
    assert len(samples) == 50
    assert samples[0].dtheta == 0.0 and samples[-1].dtheta == np.pi
    for s in samples:
        assert s.sigma == pytest.approx(s.dtheta, abs=1e-15)


def test_curve_endpoint_over_pole():
    last = report.emit_curve([0.5], 10)[-1]
    assert last.sigma == pytest.approx(np.pi - 1.0, abs=1e-15)


def test_curve_initial_slope():
    s = report.emit_curve([1.0], 240)
    assert s[1].sigma / s[1].dtheta == pytest.approx(np.cos(1.0), rel=1e-4)


@given(st.lists(st.floats(0, 1.5), min_size=1, max_size=3), st.integers(2, 40))
def test_curve_samples_recomputable(phis, count):
    samples = report.emit_curve(phis, count)
    assert len(samples) == len(phis) * count
    for s in samples:
        assert s.sigma == pytest.approx(sigma(s.phi, s.dtheta), abs=1e-12)


def test_curve_needs_two_samples():
    with pytest.raises(ValueError):
        report.emit_curve([0.0], 1)


def test_json_round_trip_is_byte_identical():
    doc = report.report_document(models.quantize_two_circles(24, 6, 0.6), include_layout=True)
    text = report.dumps(doc)
    assert report.dumps(report.loads(text)) == text
    parsed = json.loads(text)
    assert parsed["schema_version"] == "1"
    assert list(parsed) == sorted(parsed)
    assert ": " not in text and ", " not in text


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), max_size=8))
def test_numbers_round_trip_exactly(values):
    doc = report.OutputDocument("curve", [{"phi": v, "dtheta": v, "sigma": v} for v in values])
    back = report.loads(report.dumps(doc))
    assert [r["phi"] for r in back.payload] == values


def test_numpy_scalars_are_serialised():
    doc = report.OutputDocument("error", {"x": np.float64(0.1), "n": np.int64(3), "ok": np.bool_(True)})
    assert report.dumps(doc) == '{"kind":"error","metadata":{},"payload":{"n":3,"ok":true,"x":0.1},"schema_version":"1"}\n'


def test_schema_version_checked():
    with pytest.raises(ValueError):
        report.loads('{"schema_version":"2","kind":"error","payload":{}}')


def test_error_document_value():
    doc = report.report_document(models.quantize_equator(120, 6))
    payload = json.loads(report.dumps(doc))["payload"]
    assert payload["error"] == models.quantize_equator(120, 6).error
    assert payload["error"] == pytest.approx(math.pi ** 2 / 108, abs=3e-4)


def test_oracle_document_method():
    res = oracle.dp_optimal(GridSpec(12).longitudes(), 0.0, 5)
    doc = report.oracle_document(res, 12, 5, 0.0)
    assert json.loads(report.dumps(doc))["metadata"]["method"] == "DP"
    assert "backend" not in report.dumps(doc)


def test_table_csv_layout():
    rows = models.latitude_table(120, 6, [0.0, 0.6, 1.0])
    buf = io.StringIO()
    report.write_csv(report.table_document(rows, 120, 6), buf)
    text = buf.getvalue()
    assert "\r" not in text
    lines = text.split("\n")
    assert lines[0].startswith("phi0,cos2phi0,V_exact,V_asymptotic")
    assert len(lines) == 5 and lines[-1] == ""
    assert float(lines[2].split(",")[3]) == rows[1]["V_asymptotic"]


def test_empty_table_is_header_only():
    buf = io.StringIO()
    report.write_csv(report.table_document([], 120, 6), buf)
    assert buf.getvalue() == ",".join(report.CSV_COLUMNS["table"]) + "\n"


def test_curve_csv_header():
    buf = io.StringIO()
    report.write_csv(report.curve_document(report.emit_curve([0.0], 2), [0.0], 2), buf)
    assert buf.getvalue().splitlines()[0] == "phi,dtheta,sigma"


def test_verify_payload_not_tabular():
    with pytest.raises(ValueError):
        report.write_csv(report.OutputDocument("verify", {}), io.StringIO())


def test_sink_failure_propagates():
    class Broken(io.StringIO):
        def write(self, s):
            raise OSError("disk full")

    with pytest.raises(OSError):
        report.write_json(report.OutputDocument("error", {}), Broken())


@pytest.mark.parametrize("name,argv", [
    ("latitude_table.csv", ["table", "--format", "csv"]),
    ("latitude_table.json", ["table"]),
    ("two_circles_illustration.json", ["error", "--model", "two-circles", "--points", "240", "--codes", "8", "--phi", "0.6"]),
    ("equator_12_5.json", ["quantize", "--model", "equator", "--points", "12", "--codes", "5"]),
    ("two_circles_24_6.json", ["quantize", "--model", "two-circles", "--points", "48", "--codes", "6", "--phi", "0.6"]),
    ("curve.csv", ["curve", "--phis", "0,0.5,1.0", "--samples", "240", "--format", "csv"]),
    ("oracle_dp_12_5.json", ["oracle", "--method", "dp", "--points", "12", "--codes", "5"]),
])
def test_golden_files(name, argv):
    expected = (GOLDEN / name).read_text()
    assert cli_text(*argv) == expected


def test_golden_values_are_the_verified_ones():
    c1 = json.loads((GOLDEN / "equator_12_5.json").read_text())
    assert c1["payload"]["error"] == pytest.approx(11 * math.pi ** 2 / 864, rel=1e-15)
    ill = json.loads((GOLDEN / "two_circles_illustration.json").read_text())
    assert ill["payload"]["error"] == pytest.approx(0.13849868561149536, rel=1e-12)
    assert ill["metadata"]["per_circle_points"] == 120
