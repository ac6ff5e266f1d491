import json
import math

import pytest

import latentrank as lr


def test_rank_helpers():
    assert lr.midranks([4, 3, 1, 2, 3, 5]) == [5, 3.5, 1, 2, 3.5, 6]
    assert lr.rank_biserial([4, 3, 1], [2, 3, 5]) == pytest.approx(-2 / 9)
    assert lr.matched_rank_biserial([1, -1, 3]) == 0.5
    assert lr.kruskal_rhos_to_rho(lr.kruskal_rho_to_rhos(0.4)) == pytest.approx(0.4, abs=1e-12)


def test_ranksum_summary():
    x = [0.3, 1.7, -0.4, 2.2, 0.9, 1.1, 0.2, -0.8]
    y = [2.5, 1.9, 3.1, 0.8, 2.7, 4.0, 1.4, 2.2]
    out = lr.ranksum(x, y, iterations=1000, burnin=200, chains=2, threads=1)
    assert out["bf10"] * out["bf01"] == pytest.approx(1.0)
    assert out["median"] > 0
    lo, hi = out["ci"]
    assert lo < out["median"] < hi
    assert len(out["samples"]) == 2 and len(out["samples"][0]) == 1000
    again = lr.ranksum(x, y, iterations=1000, burnin=200, chains=2, threads=1)
    assert again["samples"] == out["samples"]


def test_signedrank_and_spearman():
    d = [0.4, -1.3, 2.2, 1.7, -0.2, 0.9, 3.1, 0.6]
    out = lr.signedrank(d, iterations=1000, burnin=200, chains=2, threads=1)
    assert math.isfinite(out["bf10"])
    x = list(range(20))
    y = [v * v for v in x]
    rho = lr.spearman(x, y, iterations=1000, burnin=200, chains=2, threads=1)
    assert rho["median"] > 0.8


def test_errors():
    with pytest.raises(ValueError):
        lr.signedrank([0.0, 0.0, 0.0], iterations=100, burnin=10, chains=1)
    with pytest.raises(ValueError):
        lr.spearman([1, 2, 3], [3, 1, 2])


def test_cli_roundtrip(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("d\n0.4\n-1.3\n2.2\n1.7\n-0.2\n0.9\n")
    code, out, err = lr.cli(["--test", "signedrank", "--input", str(data), "--diff", "d",
                             "--iterations", "500", "--chains", "2", "--threads", "1"])
    assert code == 0, err
    doc = json.loads(out)
    assert doc["test"] == "signedrank"
    code, _, _ = lr.cli(["--test", "signedrank", "--input", str(tmp_path / "missing.csv"), "--diff", "d"])
    assert code == 2
