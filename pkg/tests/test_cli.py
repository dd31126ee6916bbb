import csv
import io
import json
import math

import pytest

from ftcap.cli import main, render


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: v for k, v in r.items()} for r in rows]


def floats(rows, col):
    return [float(r[col]) for r in rows]


def test_fig1_default_monotone_and_above_shannon(capsys):
    code, out, _ = run(capsys, "fig1", "--T", "1", "2")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["n", "T", "rate", "shannon_rate"]
    for T in ("1", "2"):
        sub = [r for r in rows if r["T"] == T]
        assert [int(r["n"]) for r in sub] == [2**j for j in range(1, 11)]
        rates = floats(sub, "rate")
        assert all(b >= a for a, b in zip(rates, rates[1:]))
        assert rates[-1] > float(sub[-1]["shannon_rate"])


def test_fig1_bits(capsys):
    _, nats, _ = run(capsys, "fig1", "--T", "1", "--n", "2", "8")
    _, bits, _ = run(capsys, "fig1", "--T", "1", "--n", "2", "8", "--unit", "bits")
    for a, b in zip(table(nats), table(bits)):
        assert float(b["rate"]) == pytest.approx(float(a["rate"]) / math.log(2), rel=1e-11)
        assert float(b["shannon_rate"]) == pytest.approx(float(a["shannon_rate"]) / math.log(2), rel=1e-11)
        assert a["n"] == b["n"] and a["T"] == b["T"]


def test_fig3_defaults(capsys):
    code, out, _ = run(capsys, "fig3")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["P", "alpha", "T", "I_T", "T_times_Csh", "delta_I"]
    assert {r["P"] for r in rows} == {"1", "2", "4"}
    assert len(rows) == 3 * 16
    for r in rows:
        assert float(r["I_T"]) > float(r["T_times_Csh"])
        assert float(r["delta_I"]) > 0
    for P in ("1", "2", "4"):
        I = floats([r for r in rows if r["P"] == P], "I_T")
        second = [I[i + 1] - 2 * I[i] + I[i - 1] for i in range(1, len(I) - 1)]
        assert abs(second[-1]) < abs(second[0])
        assert abs(second[-1]) < 1e-2


def test_fig45_defaults(capsys):
    code, out, _ = run(capsys, "fig45")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["P", "alpha", "T", "C_T", "C_sh"]
    a1 = [r for r in rows if r["alpha"] == "1"]
    a2 = [r for r in rows if r["alpha"] == "2"]
    assert float(a1[0]["T"]) == pytest.approx(1e-3)
    assert float(a1[0]["C_T"]) == pytest.approx(1.0, rel=0.05)
    for r in rows:
        assert float(r["C_T"]) > float(r["C_sh"])
    for r1, r2 in zip(a1, a2):
        assert r1["T"] == r2["T"]
        assert float(r2["C_T"]) > float(r1["C_T"])


def test_spectrum_columns(capsys):
    code, out, _ = run(capsys, "spectrum", "--K", "200")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["k", "omega_k", "lambda_k", "trace_partial"]
    assert len(rows) == 200
    om, lam = floats(rows, "omega_k"), floats(rows, "lambda_k")
    assert all(b > a for a, b in zip(om, om[1:]))
    assert all(b < a for a, b in zip(lam, lam[1:]))


def test_spectrum_tail_mode_reaches_energy(capsys):
    code, out, _ = run(capsys, "spectrum", "--tail-tol", "1e-3")
    assert code == 0
    last = table(out)[-1]
    assert 2.0 - float(last["trace_partial"]) < 1e-3


def test_capacity_json(capsys):
    code, out, _ = run(capsys, "capacity", "--P", "0.1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 1
    assert data[0]["below_delta"] is True
    assert data[0]["margin"] > 0
    assert data[0]["delta"] == pytest.approx(0.431025, abs=1e-6)


def test_shannon_command(capsys):
    code, out, _ = run(capsys, "shannon", "--P", "1", "2")
    assert code == 0
    rows = table(out)
    assert float(rows[0]["C_sh_closed"]) == pytest.approx(0.5 * (math.sqrt(5) - 1), rel=1e-11)
    assert float(rows[1]["C_sh_closed"]) == pytest.approx(1.0, rel=1e-11)
    for r in rows:
        assert float(r["C_sh_quadrature"]) == pytest.approx(float(r["C_sh_closed"]), rel=1e-8)


def test_mi_command(capsys):
    code, out, _ = run(capsys, "mi", "--T", "2", "--n", "256", "1024")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["T", "n", "I_discrete", "rate", "I_series"]
    for r in rows:
        assert float(r["I_discrete"]) == pytest.approx(float(r["I_series"]), rel=1e-2)


def test_check_passes(capsys):
    code, out, err = run(capsys, "check")
    assert code == 0
    rows = table(out)
    assert all(r["passed"] == "true" for r in rows)
    assert "integral_equation_residual" in {r["check"] for r in rows}
    assert err == ""


def test_check_negative_control(capsys):
    code, out, err = run(capsys, "check", "--inject-omega-error")
    assert code == 3
    assert "integral_equation_residual" in err
    failed = [r["check"] for r in table(out) if r["passed"] == "false"]
    assert failed == ["integral_equation_residual"]


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "--json")
    assert code == 0
    data = json.loads(out)
    assert {"check", "value", "tolerance", "passed"} == set(data[0])
    assert all(row["passed"] is True for row in data)


@pytest.mark.parametrize(
    "argv",
    [
        ["fig1", "--n", "8", "4"],
        ["fig1", "--T", "-1"],
        ["capacity", "--alpha", "0"],
        ["spectrum", "--unit", "furlongs"],
        ["nonsense"],
        [],
    ],
)
def test_invalid_arguments_exit_1(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1
    assert capsys.readouterr().err


def test_numerical_failure_exit_2(capsys):
    code, out, err = run(capsys, "capacity", "--K", "64", "--tail-tol", "1e-15")
    assert code == 2
    assert out == ""
    assert "numerical failure" in err


def test_csv_format(capsys):
    _, out, _ = run(capsys, "spectrum", "--K", "3")
    lines = out.split("\n")
    assert lines[0] == "k,omega_k,lambda_k,trace_partial"
    assert lines[-1] == ""
    assert "\r" not in out
    assert lines[1].split(",")[1] == format(0.860333589019, ".12g")
    for cell in lines[1].split(",")[1:]:
        digits = cell.replace(".", "").replace("-", "").split("e")[0].lstrip("0")
        assert len(digits) <= 12


def test_out_writes_identical_bytes(capsys, tmp_path):
    path = tmp_path / "spec.csv"
    _, printed, _ = run(capsys, "spectrum", "--K", "16")
    assert main(["spectrum", "--K", "16", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert path.read_bytes() == printed.encode("utf-8")


def test_render_json_rounds():
    text = render(["x", "ok"], [dict(x=1 / 3, ok=True)], "json")
    assert json.loads(text) == [{"x": 0.333333333333, "ok": True}]
