import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helscat.cli import (EXIT_CONFIG, EXIT_DATA, ConfigError, RunConfig, main, parse_config,
                         read_spectrum_csv, write_output)

SMALL = ["--lambda-min-nm", "1000", "--lambda-max-nm", "1010", "--n-lambda", "5"]
PULSES = ["--lambda-in", "1000:1002:3"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


@pytest.fixture(scope="module")
def purity_cache(tmp_path_factory):
    path = tmp_path_factory.mktemp("cache") / "spectrum.csv"
    assert main(["spectrum", "--for-purity", "--threads", "1", "--out", str(path)] + PULSES) == 0
    return path


def test_empty_config_gives_defaults(tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("# nothing set\n\n")
    assert parse_config(cfg) == RunConfig()
    assert RunConfig().sigma == 3e12


def test_file_then_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sigma_thz = 2.0\nradius_nm = 240  # comment\n")
    config = parse_config(cfg, {"sigma_thz": "1.5"})
    assert config.sigma_thz == 1.5 and config.radius_nm == 240.0


@pytest.mark.parametrize("text", ["na = 1.3\n", "bogus_key = 1\n", "radius_nm = -5\n",
                                  "lambda_in = 1000:990\n", "na 0.5\n", "focal_phase = maybe\n"])
def test_invalid_config_exit_code(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        parse_config(cfg)
    code, out, err = run(capsys, "xsec", "--config", str(cfg))
    assert code == EXIT_CONFIG and "configuration error" in err and out == ""


def test_flag_validation(capsys):
    assert run(capsys, "xsec", "--na", "1.3")[0] == EXIT_CONFIG
    assert run(capsys, "xsec", "--threads", "0")[0] == EXIT_CONFIG


def test_missing_material_is_data_error(tmp_path, capsys):
    code, _, err = run(capsys, "xsec", "--material", str(tmp_path / "nope.txt"), *SMALL)
    assert code == EXIT_DATA


def test_spectrum_output_and_determinism(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["spectrum", "--threads", "1", "--out", str(out1)] + SMALL) == 0
    assert main(["spectrum", "--threads", "2", "--out", str(out2)] + SMALL) == 0
    text = out1.read_text()
    assert text == out2.read_text()
    rows = body(text)
    assert rows[0] == "lambda_nm,re_alpha,im_alpha,re_beta,im_beta"
    assert len(rows) == 6
    assert text.startswith("# helscat ")
    spec, fp = read_spectrum_csv(out1)
    assert_allclose(np.sort(spec.lambda_nm), np.linspace(1000, 1010, 5))
    assert np.all(np.abs(spec.alpha) ** 2 + np.abs(spec.beta) ** 2 <= 1)
    assert len(fp) == 16


def test_xsec_columns(capsys):
    code, out, _ = run(capsys, "xsec", *SMALL)
    assert code == 0
    rows = [list(map(float, r.split(","))) for r in body(out)[1:]]
    assert len(rows) == 5
    for lam, total, a2, b3, rest in rows:
        assert_allclose(a2 + b3 + rest, total, rtol=1e-12)
        assert total > 0 and rest >= -1e-15


def test_cached_purity_matches_fresh_sweep(tmp_path, purity_cache, capsys):
    code, cached, _ = run(capsys, "purity", "--threads", "1", "--spectrum-cache", str(purity_cache),
                          *PULSES)
    assert code == 0
    code, fresh, _ = run(capsys, "purity", "--threads", "1", *PULSES)
    assert code == 0
    assert cached == fresh
    rows = body(fresh)
    assert rows[0].startswith("lambda_in_nm,purity_exact,purity_approx")
    values = np.array([list(map(float, r.split(","))) for r in rows[1:]])
    assert_allclose(values[:, 0], [1000, 1001, 1002])
    assert np.all((values[:, 1] >= 0) & (values[:, 1] < 0.5))


def test_cache_fingerprint_mismatch(purity_cache, capsys):
    code, _, err = run(capsys, "purity", "--spectrum-cache", str(purity_cache), "--radius-nm", "240",
                       *PULSES)
    assert code == EXIT_DATA and "fingerprint" in err
    code, _, _ = run(capsys, "purity", "--spectrum-cache", str(purity_cache), "--radius-nm", "240",
                     "--force", *PULSES)
    assert code == 0


def test_cache_coverage_checked(purity_cache, capsys):
    code, _, err = run(capsys, "purity", "--spectrum-cache", str(purity_cache),
                       "--lambda-in", "1100:1101:2")
    assert code == EXIT_DATA and "covers" in err


def test_sigma_change_keeps_cache_valid(purity_cache, capsys):
    # sigma is not part of the classical fingerprint; a narrower pulse fits the same cache
    code, _, _ = run(capsys, "purity", "--spectrum-cache", str(purity_cache), "--sigma-thz", "2",
                     *PULSES)
    assert code == 0


def test_rho_document(purity_cache, capsys):
    code, out, _ = run(capsys, "rho", "--spectrum-cache", str(purity_cache), "--rho-lambda-nm", "1001")
    assert code == 0
    doc = json.loads(out)
    rho = np.array(doc["re"]) + 1j * np.array(doc["im"])
    assert doc["basis"] == ["psi_plus", "psi_minus", "chi_plus", "chi_minus"]
    assert_allclose(np.trace(rho), 1, atol=1e-12)
    assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert_allclose(doc["purity"], 1 - np.trace(rho @ rho).real, atol=1e-12)


def test_rho_null_input_is_numeric_failure(purity_cache, capsys):
    code, _, err = run(capsys, "rho", "--spectrum-cache", str(purity_cache), "--rho-lambda-nm",
                       "1001", "--rho-input", "chi_minus")
    assert code == 4 and "zero output state" in err


def test_lorentzian_demo(capsys):
    code, out, _ = run(capsys, "lorentzian-demo")
    assert code == 0
    values = dict(line.split(" = ") for line in out.splitlines() if " = " in line)
    assert_allclose(float(values["purity_exact"]), 0.46034554184, atol=1e-10)
    assert_allclose(float(values["tau_chi_s"]), -1e-12, rtol=1e-3)


def test_write_output_is_atomic(tmp_path, monkeypatch):
    target = tmp_path / "out.csv"
    target.write_text("old\n")

    class Boom(Exception):
        pass

    def fail(*args, **kwargs):
        raise Boom

    monkeypatch.setattr("helscat.cli.os.replace", fail)
    with pytest.raises(Boom):
        write_output("new\n", target)
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
