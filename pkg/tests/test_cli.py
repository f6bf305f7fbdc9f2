import io
import json
import math

import pytest

from horolab.cli import main
from horolab.experiments import CSV_HEADER, records_from_csv

G_SQRT2 = f"1,0,{math.sqrt(2)!r},1"


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    return json.loads(text)


def test_sieve_check_lemma1():
    rows = run_json("sieve-check", "--op", "lemma1-unit", "--R", "1000", "--k", "1,2")
    assert [r["k"] for r in rows] == [1, 2]
    assert rows[0]["lhs"] == pytest.approx(1.0, abs=0.05)


def test_sieve_check_nu_average():
    (row,) = run_json("sieve-check", "--op", "nu-average", "--R", "20", "--T", "100000")
    assert row["lhs"] == pytest.approx(1.0, abs=0.25)


def test_sw_check():
    out = run_json("sw-check", "--R", "3", "--q", "5", "--seed", "4")
    assert len(out["progressions"]) == 4
    assert len(out["f"]) == 5


def test_reduce_point_and_element():
    out = run_json("reduce", "--z", "5,1")
    assert out["z"] == pytest.approx([0.0, 1.0])
    assert out["gamma"] == "1.0,-5.0,0.0,1.0"
    out = run_json("reduce", "--g", "1,5,0,1")
    assert out["y"] == pytest.approx(1.0)


def test_fundamental_period_json():
    out = run_json("fundamental-period", "--g", "1,0,0,1", "--T", "1000")
    assert out["yT"] == pytest.approx(1.0)
    assert out["witness"] == [0, 1]
    assert set(out) == {"yT", "witness", "y0", "T"}


def test_r_param():
    out = run_json("r-param", "--g", G_SQRT2, "--T", "1e4")
    assert out["r"] <= 1e4
    assert out["r_times_yT"] == pytest.approx(out["r"] * out["yT"])


def test_approx():
    out = run_json("approx", "--g", G_SQRT2, "--T", "1e6", "--t0", "250000", "--K", "100", "--samples", "11")
    assert out["period"] == pytest.approx(1 / out["y0"], rel=1e-9)
    assert out["inside_exceptional"] is False
    assert out["excluded"][0]["kind"] == "core"


def test_orbit_sum_csv():
    code, text = run("orbit-sum", "--g", G_SQRT2, "--T", "1000,2000", "--out", "csv")
    assert code == 0
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    recs = records_from_csv(text)
    assert [r.T for r in recs] == [1000.0, 2000.0]


def test_discrepancy_nu_csv():
    code, text = run("discrepancy", "--g", G_SQRT2, "--T", "20000,10000", "--weight", "nu", "--R", "30", "--out", "csv")
    assert code == 0
    recs = records_from_csv(text)
    assert [r.T for r in recs] == [10000.0, 20000.0]
    assert all(r.R == 30.0 and r.weight_kind == "nu" for r in recs)


def test_primes():
    out = run_json("primes", "--g", G_SQRT2, "--T", "50000", "--theta", "0.2")
    assert out["slack"] >= 0
    assert out["pointwise_ok"] is True


def test_venkatesh():
    out = run_json("venkatesh", "--g", G_SQRT2, "--T", "1e4", "--s-list", "1,4")
    assert out[1]["bound"] == pytest.approx(2 * out[0]["bound"])


def test_smallaps():
    out = run_json("smallaps", "--P", "20", "--q", "12", "--s-list", "1,2,3", "--K", "1e4")
    assert [r["s"] for r in out] == [1, 2, 3]


@pytest.mark.parametrize(
    "argv",
    [
        ("fundamental-period", "--g", "1,0,0,1", "--T", "-5"),
        ("fundamental-period", "--g", "1,2,3,4", "--T", "5"),
        ("r-param", "--T", "100"),
        ("approx", "--g", G_SQRT2, "--T", "100", "--t0", "500"),
        ("smallaps", "--q", "12", "--s-list", "5"),
        ("orbit-sum", "--g", G_SQRT2, "--T", "100", "--f", "nonsense"),
    ],
)
def test_precondition_exit_code(argv):
    assert run(*argv)[0] == 2


def test_capacity_exit_code():
    assert run("orbit-sum", "--g", G_SQRT2, "--T", "1e11", "--weight", "nu", "--R", "10")[0] == 3


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        run("nope")
    assert info.value.code == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"g": "1,0,0,1", "T": "100"}))
    out = run_json("fundamental-period", "--config", str(cfg))
    assert out["T"] == 100.0
    out = run_json("fundamental-period", "--config", str(cfg), "--T", "7")
    assert out["T"] == 7.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus": 1}))
    assert run("reduce", "--config", str(bad))[0] == 2


def test_threads_give_identical_csv():
    base = ("discrepancy", "--g", G_SQRT2, "--T", "30000", "--weight", "prime", "--out", "csv")
    assert run(*base, "--threads", "1")[1] == run(*base, "--threads", "4")[1]
