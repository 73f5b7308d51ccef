import csv
import json

import pytest

from fwadopt.cli import SWEEP_HEADER, load_config, main, parse_config
from fwadopt.errors import ConfigError

R1_JSON = {
    "mu": 1, "lambda": 0.5, "gamma": 1, "r": 0.5, "c0": 0.1, "c": 0.4,
    "c1i": 1, "c2i": 1, "pi0": 0.3, "alpha": 0, "Pi0": 1, "Pi1": 0.4,
}


@pytest.fixture
def config(tmp_path):
    def write(**changes):
        data = dict(R1_JSON)
        for k, v in changes.items():
            if v is None:
                data.pop(k, None)
            else:
                data[k] = v
        path = tmp_path / "params.json"
        path.write_text(json.dumps(data, indent=2))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def values(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines() if "=" in line)


def test_load_config_derives_pi1(config):
    cfg = load_config(config())
    assert cfg.params.profile.pi1 == pytest.approx(0.12)


def test_intensity_alias(config):
    path = config(**{"lambda": None, "intensity": 0.5})
    assert load_config(path).params.threat.lam == 0.5


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"pi1": 0.12}, "pi1/alpha mutually exclusive"),
        ({"alpha": None}, "one of pi1/alpha"),
        ({"gamma": None}, "missing key(s): gamma"),
        ({"bogus": 1}, "unknown key 'bogus'"),
        ({"mu": "fast"}, "'mu' must be a finite number"),
        ({"Pi1": 0.2}, "Pi1"),
    ],
)
def test_config_errors(config, changes, message):
    with pytest.raises(ConfigError, match=None) as info:
        load_config(config(**changes))
    assert message in str(info.value)


def test_config_error_cites_line(config):
    with pytest.raises(ConfigError) as info:
        load_config(config(bogus=1))
    assert ":14:" in str(info.value)
    with pytest.raises(ConfigError) as info:
        parse_config('{\n "mu": 1,\n}', "x.json")
    assert "x.json:3" in str(info.value)
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config('{"mu": 1, "mu": 2}')


def test_ordering_violation_cites_table(config):
    with pytest.raises(ConfigError, match="pi1 <= pi0 <= Pi1 <= Pi0"):
        load_config(config(Pi1=0.2))


def test_eval(capsys, config):
    code, out, _ = run(capsys, "eval", "--config", config())
    v = values(out)
    assert code == 0
    assert v["G_N"] == "-1.66666667"
    assert v["D"] == "-0.326402016"
    assert v["P"] == "0.333333333"


def test_eval_domain_error(capsys, config):
    code, _, err = run(capsys, "eval", "--config", config(), "--x", "1.5")
    assert code == 2 and "x must lie" in err


def test_usage_and_io_codes(capsys, config, tmp_path):
    assert run(capsys, "eval")[0] == 2
    assert run(capsys, "eval", "--config", str(tmp_path / "missing.json"))[0] == 4
    assert run(capsys, "eval", "--config", config(bogus=1))[0] == 2


def test_equilibrium(capsys, config, tmp_path):
    out_csv = tmp_path / "eq.csv"
    code, out, _ = run(capsys, "equilibrium", "--config", config(), "--csv", str(out_csv))
    v = values(out)
    assert code == 0
    assert float(v["zeta"]) == pytest.approx(0.3157, abs=1e-4)
    assert float(v["zeta_prime"]) == pytest.approx(0.5459, abs=1e-4)
    assert v["classification"] == "interior"
    assert v["dx_star_dr_predicted_sign"] == "+"
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["quantity", "value"]
    assert ["classification", "interior"] in rows


def test_equilibrium_zero_adoption(capsys, config):
    code, out, _ = run(capsys, "equilibrium", "--config", config(c=3))
    v = values(out)
    assert code == 0 and v["classification"] == "zero-adoption" and v["roots"] == ""
    assert v["dx_star_dPi1"] == "n/a"


def test_simulate_ode(capsys, config, tmp_path):
    out = tmp_path / "ode.csv"
    assert run(capsys, "simulate", "--config", config(), "--horizon", "1", "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,y,x,region"
    event = [l for l in lines[1:] if l.endswith(",boundary")][0]
    assert float(event.split(",")[0]) == pytest.approx(0.37945, abs=1e-3)
    # shortest round-trip decimals
    assert "0.1," in out.read_text()


def test_simulate_agents_deterministic(capsys, config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(capsys, "simulate", "--config", config(), "--mode", "agents", "--n", "500",
                         "--seed", "42", "--horizon", "3", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_errors(capsys, config, tmp_path):
    assert run(capsys, "simulate", "--config", config(), "--horizon", "0")[0] == 2
    assert run(capsys, "simulate", "--config", config(), "--mode", "agents")[0] == 2
    bad = str(tmp_path / "missing" / "x.csv")
    assert run(capsys, "simulate", "--config", config(), "--out", bad)[0] == 4


def test_phase(capsys, config, tmp_path):
    out = tmp_path / "phase.csv"
    assert run(capsys, "phase", "--config", config(), "--grid", "50", "--out", str(out))[0] == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "y", "dx", "dy", "region"]
    lattice = [r for r in rows[1:] if r[4] != "equilibrium"]
    assert len(lattice) == 1275
    flagged = [(float(r[0]), float(r[1])) for r in rows[1:] if r[4] == "equilibrium"]
    assert any(abs(x - 0.546) < 1e-3 and y == 0.0 for x, y in flagged)
    assert run(capsys, "phase", "--config", config(), "--grid", "1", "--out", str(out))[0] == 2


def test_policy(capsys, config, tmp_path):
    curves = tmp_path / "curves.csv"
    code, out, _ = run(capsys, "policy", "--config", config(), "--grid", "16", "--csv", str(curves))
    v = values(out)
    assert code == 0
    assert float(v["poa"]) == pytest.approx(0.8204, abs=1e-4)
    assert float(v["soposh"]) == pytest.approx(1.111, abs=1e-3)
    assert float(v["seposh"]) == pytest.approx(1.376, abs=1e-3)
    assert float(v["pi1_opt[centralized]"]) == 0.3
    rows = list(csv.reader(curves.open()))
    assert rows[0] == ["view", "Pi1", "pi1", "x_star", "objective", "interior"]
    assert len(rows) == 1 + 4 * 17


def test_policy_no_outgoing_protection(capsys, config):
    code, out, _ = run(capsys, "policy", "--config", config(Pi1=1), "--grid", "16")
    assert code == 0 and float(values(out)["poa"]) == 1.0


def test_sweep(capsys, config, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--config", config(), "--axis", "Pi1", "--lo", "0.3", "--hi", "1.0",
                     "--steps", "15", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert tuple(rows[0].keys()) == SWEEP_HEADER
    assert [float(r["value"]) for r in rows] == sorted(float(r["value"]) for r in rows)
    interior = [float(r["x_star"]) for r in rows if r["zeta"] and 0 < float(r["x_star"]) < 1]
    assert len(interior) > 5 and all(b > a for a, b in zip(interior, interior[1:]))
    assert rows[-1]["zeta"] == ""


def test_sweep_parallel_identical(capsys, config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--config", config(), "--axis", "r", "--lo", "0.1", "--hi", "2.0", "--steps", "6"]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b), "--jobs", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    xs = [float(r["x_star"]) for r in csv.DictReader(a.open())]
    assert all(y >= x for x, y in zip(xs, xs[1:]))


def test_sweep_single_step_and_bad_axis(capsys, config, tmp_path):
    out = tmp_path / "s.csv"
    args = ["sweep", "--config", config(), "--lo", "0.2", "--hi", "0.9", "--out", str(out)]
    assert run(capsys, *args, "--axis", "c", "--steps", "1")[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1 and float(rows[0]["value"]) == 0.2
    assert run(capsys, *args, "--axis", "bogus")[0] == 2
