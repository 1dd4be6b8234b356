import csv
import io
import json

import numpy as np
import pytest

from r2opuc import cli


def run(capsys, *argv):
    status = cli.main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_zeros_ex3(capsys):
    status, out, _ = run(capsys, "zeros", "--example", "ex3", "--n", "3")
    assert status == 0
    x = [float(r["x"]) for r in rows(out)]
    np.testing.assert_allclose(x, [1.0, 0.0, -1.0], atol=1e-14)


def test_zeros_points_lie_on_circle(capsys):
    _, out, _ = run(capsys, "zeros", "--seed", "7", "--n", "9")
    for r in rows(out):
        x = float(r["x"])
        z = complex(float(r["zeta_re"]), float(r["zeta_im"]))
        assert abs(z) == pytest.approx(1.0, abs=1e-15)
        assert z == pytest.approx((x + 1j) / (x - 1j), abs=1e-14)


def test_verblunsky_ex1_vanishes(capsys):
    status, out, _ = run(capsys, "verblunsky", "--example", "ex1", "--n", "5")
    assert status == 0
    table = rows(out)
    assert len(table) == 5
    for r in table:
        assert float(r["alpha_re"]) == 0.0 and float(r["alpha_im"]) == 0.0
        assert float(r["tau_re"]) == 1.0


def test_verify_ex4_passes(capsys):
    status, out, _ = run(capsys, "verify", "--example", "ex4", "--lambda", "1", "--eta", "1", "--n", "8")
    assert status == 0
    table = rows(out)
    assert {r["check"] for r in table} >= {"eigen_vs_bisection", "discrete_orthogonality", "alpha_closed_form"}
    assert all(r["pass"] == "true" for r in table)


def test_verify_json(capsys):
    status, out, _ = run(capsys, "verify", "--seed", "3", "--n", "6", "--output", "json")
    data = json.loads(out)
    assert status == 0
    assert data["columns"] == ["check", "value", "tolerance", "pass"]
    assert all(r[3] is True for r in data["rows"])


def test_nu_requires_multiple_parameter(capsys):
    status, _, err = run(capsys, "nu", "--example", "ex1", "--n", "4")
    assert status == 2
    assert "RequiresMultipleParameter" in err


def test_nu_ex3(capsys):
    status, out, _ = run(capsys, "nu", "--example", "ex3", "--n", "3")
    assert status == 0
    M = [float(r["M_k+1"]) for r in rows(out)]
    np.testing.assert_allclose(M, 0.5, atol=1e-10)


def test_weights_json_sums(capsys):
    status, out, _ = run(capsys, "weights", "--seed", "1", "--n", "6", "--output", "json")
    data = json.loads(out)
    assert status == 0
    assert len(data["rows"]) == 6
    assert data["sum_lambda_hat"] == pytest.approx(1.0, abs=1e-12)
    assert sum(r[3] for r in data["rows"]) == pytest.approx(1.0, abs=1e-12)


def test_input_file(tmp_path, capsys):
    path = tmp_path / "data.json"
    path.write_text(json.dumps({"c": [0.0] * 4, "d": [0.5, 0.25, 0.25, 0.25]}))
    status, out, _ = run(capsys, "weights", "--input", str(path), "--n", "4")
    assert status == 0
    lam_hat = [float(r["lambda_hat"]) for r in rows(out)]
    np.testing.assert_allclose(lam_hat, 0.25, atol=1e-14)


def test_bad_input_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    status, _, err = run(capsys, "zeros", "--input", str(path), "--n", "3")
    assert status == 2
    assert "cannot read" in err


def test_short_input_rejected(tmp_path, capsys):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"c": [0.0, 0.0], "d": [0.5]}))
    status, _, _ = run(capsys, "zeros", "--input", str(path), "--n", "5")
    assert status == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["zeros", "--n", "3"],
        ["zeros", "--example", "ex4", "--n", "3"],
        ["zeros", "--example", "ex2", "--n", "3"],
        ["zeros", "--example", "ex1", "--n", "1"],
        ["fixtures", "--n", "3"],
    ],
)
def test_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_both_sources_rejected(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"c": [0.0] * 4, "d": [0.5] * 4}))
    assert run(capsys, "zeros", "--example", "ex1", "--input", str(path), "--n", "3")[0] == 2


def test_seed_is_reproducible(capsys):
    a = run(capsys, "zeros", "--seed", "11", "--n", "7")[1]
    b = run(capsys, "zeros", "--seed", "11", "--n", "7")[1]
    assert a == b


def test_moments_ex3(capsys):
    status, out, _ = run(capsys, "moments", "--example", "ex3", "--n", "3")
    assert status == 0
    m = {int(r["k"]): complex(float(r["re"]), float(r["im"])) for r in rows(out)}
    assert set(m) == set(range(-2, 3))
    assert m[0] == pytest.approx(1.0, abs=1e-15)
    assert m[1] == pytest.approx(-0.5, abs=1e-15)
    assert m[-1] == pytest.approx(m[1].conjugate(), abs=1e-15)


def test_sfamily_ex1(capsys):
    status, out, _ = run(capsys, "sfamily", "--example", "ex1", "--s", "0.5", "--n", "3")
    assert status == 0
    table = rows(out)
    assert float(table[0]["c_k"]) == pytest.approx(-1.0)
    assert "# s=0.5" in out


def test_sfamily_file_input_round_trips(tmp_path, capsys):
    # s = 0 with Im I = -c_1/2 gives back the data
    rng = np.random.default_rng(5)
    ell = np.r_[0.0, rng.uniform(0.05, 0.95, 5)]
    c = rng.uniform(-2, 2, 6)
    d = (1 - ell[:-1]) * ell[1:]
    path = tmp_path / "in.json"
    path.write_text(json.dumps({"c": c.tolist(), "d": d.tolist()}))
    status, out, _ = run(capsys, "sfamily", "--input", str(path), "--n", "4")
    assert status == 0
    got = [float(r["c_k"]) for r in rows(out)]
    np.testing.assert_allclose(got, c[:4], atol=1e-12)


def test_fixtures_json(capsys):
    status, out, _ = run(capsys, "fixtures", "--example", "ex3", "--n", "4")
    assert status == 0
    data = json.loads(out)
    assert data["N"] == 4
    np.testing.assert_allclose(data["d"][:3], [0.25] * 3)


def test_no_negative_zero():
    assert cli._num(-0.0) == "0.0"
    assert cli._json(np.float64(-0.0)) == 0.0
    assert cli._num(np.bool_(True)) == "true"


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        cli.main(["bogus"])
