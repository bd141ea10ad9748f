import json
from pathlib import Path

import numpy as np
import pytest

from gssf import cli, config, io
from gssf.grid import make_grid
from gssf.gstate import vacuum
from gssf.stepper import NumericalAbort

from conftest import random_physical_state, random_two_envelope_state

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SOLITON_CFG = """# small soliton
scenario = soliton
n_bar = 1000
M = 64
t_final = 0.05   # in soliton periods
steps = 10
checkpoints = 1
"""


# --- io -------------------------------------------------------------------------------


@pytest.mark.parametrize("two", [False, True])
def test_state_round_trip_is_bit_identical(tmp_path, rng, two):
    g = make_grid(6, 1.5e-12)
    s = (random_two_envelope_state if two else random_physical_state)(g, rng).to_k()
    stem = io.save_state(tmp_path / "run.v1" / "state", s, {"t": 0.25})
    back = io.load_state(stem)
    assert type(back) is type(s) and back.domain == "k" and back.grid == g
    names = s.MEANS + s.BLOCKS if two else ("mu", "Cp", "Cm")
    for n in names:
        assert getattr(back, n).tobytes() == getattr(s, n).tobytes()
    side = json.loads((tmp_path / "run.v1" / "state.json").read_text())
    assert side["t"] == 0.25 and side["endianness"] == "little" and side["units"]


def test_dotted_names_and_suffixes(tmp_path):
    stem = io.write_arrays(tmp_path / "a.b", {"x": np.arange(3.0)})
    assert (tmp_path / "a.b.bin").exists()
    arrays, _ = io.read_arrays(tmp_path / "a.b.json")
    assert np.array_equal(arrays["x"], np.arange(3.0))
    assert stem.name == "a.b"


def test_unknown_state_kind(tmp_path):
    io.write_arrays(tmp_path / "x", {"y": np.zeros(2)}, {"kind": "other", "grid": {"M": 2, "window": 1}})
    with pytest.raises(ValueError, match="unknown state kind"):
        io.load_state(tmp_path / "x")
    with pytest.raises(TypeError):
        io.save_state(tmp_path / "y", object())


def test_csv_round_trip(tmp_path):
    io.write_csv(tmp_path / "t.csv", {"f": np.arange(3.0), "z": np.array([1 + 2j, 0, -1j])})
    d = io.read_csv(tmp_path / "t.csv")
    assert set(d) == {"f", "re_z", "im_z"}
    assert np.allclose(d["im_z"], [2, 0, -1])


def test_manifest_handles_numpy(tmp_path):
    io.write_manifest(tmp_path / "m.json", {"a": np.float64(1.5), "b": np.arange(2),
                                            "p": tmp_path})
    assert json.loads((tmp_path / "m.json").read_text())["b"] == [0, 1]


# --- config ---------------------------------------------------------------------------


def test_parse_and_coerce():
    cfg = config.from_dict(config.parse_text(SOLITON_CFG))
    assert cfg.scenario == "soliton"
    assert cfg.grid["M"] == 64 and isinstance(cfg.physics["n_bar"], float)
    assert cfg.get("scheme") == "strang-rk4"
    again = config.from_dict(config.parse_text(config.dumps(cfg)))
    assert again.flat() == cfg.flat()
    assert cfg.with_(steps=20).get("steps") == 20


@pytest.mark.parametrize("text, key", [
    ("n_bar = 1", "scenario"),
    ("scenario = laser", "scenario"),
    (SOLITON_CFG + "colour = red\n", "colour"),
    (SOLITON_CFG.replace("steps = 10", "steps = ten"), "steps"),
    (SOLITON_CFG.replace("M = 64", "M = 63"), "M"),
    (SOLITON_CFG.replace("n_bar = 1000", "n_bar = -1"), "n_bar"),
    (SOLITON_CFG + "model = exact\n", "model"),
    (SOLITON_CFG.replace("steps = 10\n", ""), "steps"),
    (SOLITON_CFG + "steps = 5\n", "steps"),
    (SOLITON_CFG + "scheme = euler\n", "scheme"),
    ("scenario = kerr\nalpha0 = 1\nt_final = 1\nsteps = 10\nsamples = 3\n", "samples"),
    ("OPG", "mismatch_sign"),
])
def test_config_errors_name_the_key(text, key):
    if text == "OPG":
        text = (CONFIGS / "opg.cfg").read_text().replace("mismatch_sign = 1", "mismatch_sign = 2")
    with pytest.raises(config.ConfigError) as info:
        config.from_dict(config.parse_text(text))
    assert info.value.key == key
    assert key in str(info.value)


def test_syntax_errors():
    with pytest.raises(config.ConfigError, match="line 2"):
        config.parse_text("scenario = kerr\njust words\n")
    with pytest.raises(config.ConfigError):
        config.parse_text("1x = 3")
    with pytest.raises(config.ConfigError):
        config.parse_text("a =")
    with pytest.raises(config.ConfigError, match="cannot read"):
        config.load("/nonexistent/file.cfg")


def test_shipped_configs_parse():
    root = CONFIGS
    names = sorted(p.stem for p in root.glob("*.cfg"))
    assert names == ["kerr", "opg", "scg", "soliton"]
    for p in root.glob("*.cfg"):
        cfg = config.load(p)
        assert cfg.scenario == p.stem
    scg = cli.scenario_from_config(config.load(root / "scg.cfg"))
    assert scg.fh_energy_pJ > 0 and scg.sh_energy_pJ == 0
    opg = cli.scenario_from_config(config.load(root / "opg.cfg"))
    assert opg.sh_energy_pJ > 0 and opg.fh_energy_pJ == 0


# --- cli ------------------------------------------------------------------------------


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_cli_soliton_run(tmp_path):
    out = tmp_path / "out"
    rc = cli.main(["run", "--config", str(_write(tmp_path, SOLITON_CFG)), "--out", str(out)])
    assert rc == cli.EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "ok" and man["conservation"] == "ok"
    assert man["residuals"]["photon_drift"] < 1e-9
    assert man["config"]["n_bar"] == 1000
    assert (out / "states" / "step_0010.bin").exists()
    assert (out / "supermodes_step_0010.csv").exists()
    st = io.load_state(out / "states" / "step_0010")
    assert st.grid.M == 64

    rc = cli.main(["decompose", str(out / "states" / "step_0010"), "--out", str(tmp_path / "d")])
    assert rc == cli.EXIT_OK and (tmp_path / "d" / "supermodes_state.csv").exists()


def test_cli_kerr_run_with_oracle(tmp_path):
    text = "scenario = kerr\nalpha0 = 2\nkappa_over_g = 0.5\nt_final = 0.05\nsteps = 100\n" \
           "samples = 10\nfock_D = 20\n"
    out = tmp_path / "k"
    assert cli.main(["run", "--config", str(_write(tmp_path, text)), "--out", str(out)]) == 0
    nlg = io.read_csv(out / "kerr_nlg.csv")
    fock = io.read_csv(out / "kerr_fock.csv")
    assert np.allclose(nlg["n_bar"], fock["n_bar"], rtol=1e-6)


def test_cli_convergence_check(tmp_path):
    out = tmp_path / "c"
    rc = cli.main(["run", "--config", str(_write(tmp_path, SOLITON_CFG)), "--out", str(out),
                   "--convergence-check"])
    assert rc == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["convergence"]["steps"] == [10, 20]
    assert 0 < man["convergence"]["max_rel_diff"] < 1e-2


def test_cli_config_error_exit_code(tmp_path, capsys):
    rc = cli.main(["run", "--config", str(_write(tmp_path, SOLITON_CFG + "bogus = 1\n"))])
    assert rc == cli.EXIT_CONFIG
    assert "bogus" in capsys.readouterr().err


def test_cli_numerical_abort(tmp_path, monkeypatch):
    g = make_grid(4, 1.0)

    def boom(cfg, out, opts):
        raise NumericalAbort("non-finite moments", last_good=(0.5, vacuum(g)))

    monkeypatch.setitem(cli.RUNNERS, "soliton", boom)
    out = tmp_path / "a"
    rc = cli.main(["run", "--config", str(_write(tmp_path, SOLITON_CFG)), "--out", str(out)])
    assert rc == cli.EXIT_ABORT
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "aborted" and man["last_good_t"] == 0.5
    assert io.load_state(out / "states" / "last_good").grid == g


def test_cli_decompose_unphysical_state(tmp_path):
    s = vacuum(make_grid(2, 1.0))
    s.Cp[:] = 2.0  # squeezing without the matching noise
    io.save_state(tmp_path / "bad", s)
    assert cli.main(["decompose", str(tmp_path / "bad"), "--out", str(tmp_path / "o")]) == 3


def test_cli_heterodyne(tmp_path, rng):
    s = random_two_envelope_state(make_grid(8, 1e-12), rng)
    io.save_state(tmp_path / "s", s)
    rc = cli.main(["heterodyne", str(tmp_path / "s"), "--wavelength-nm", "2090",
                   "--out", str(tmp_path / "h")])
    assert rc == 0
    lines = io.read_csv(tmp_path / "h" / "ceo_lines.csv")
    assert {"f_hz", "S", "N_shot", "N_para"} <= set(lines)
    io.save_state(tmp_path / "one", random_physical_state(make_grid(4, 1.0), rng))
    assert cli.main(["heterodyne", str(tmp_path / "one"), "--wavelength-nm", "2090",
                     "--out", str(tmp_path / "h2")]) == cli.EXIT_CONFIG


def test_cli_bench(capsys):
    assert cli.main(["bench", "--kind", "chi3", "--M", "32", "64", "--steps", "1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("M,seconds_per_step") and "fitted exponent" in out


def test_cli_oracle(tmp_path):
    assert cli.main(["oracle", "chi2", "--D", "24", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "oracle_chi2.csv").exists()
