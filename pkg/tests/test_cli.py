# test_cli.py
# End-to-end runs of the coherent CLI. Reports are written with --out and read back.

import json

import pytest
from click.testing import CliRunner

from coherent.main import cli


@pytest.fixture
def runner(coherent_home):
    return CliRunner()


@pytest.fixture
def hermite(spec_file):
    return spec_file({"type": "hermite"})


@pytest.fixture
def laguerre(spec_file):
    return spec_file({"type": "laguerre", "alpha": 0})


def run(runner, tmp_path, args):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, args + ["--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return result, report


# ------------------------------------------------------------------
# recurrence / moments
# ------------------------------------------------------------------

def test_recurrence_hermite(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, ["recurrence", "--u", hermite, "--nmax", "4"])
    assert result.exit_code == 0, result.output
    assert report["beta"] == ["0/1"] * 5
    assert report["gamma"] == ["1/2", "1/1", "3/2", "2/1"]
    assert report["positive_definite"]


def test_recurrence_laguerre(runner, tmp_path, laguerre):
    result, report = run(runner, tmp_path, ["recurrence", "--u", laguerre, "--nmax", "3"])
    assert result.exit_code == 0, result.output
    assert report["beta"] == ["1/1", "3/1", "5/1", "7/1"]
    assert report["gamma"] == ["1/1", "4/1", "9/1"]


def test_recurrence_singular_functional(runner, tmp_path, spec_file):
    singular = spec_file({"type": "moments", "moments": [1, 1, 1, 1]})
    result, report = run(runner, tmp_path, ["recurrence", "--u", singular, "--nmax", "1"])
    assert result.exit_code == 2
    assert report is None


def test_recurrence_missing_spec(runner, tmp_path):
    result, _ = run(runner, tmp_path, ["recurrence", "--u", str(tmp_path / "nope.yaml")])
    assert result.exit_code == 6


def test_recurrence_from_moment_values(runner, tmp_path, spec_file):
    gaussian = spec_file({"type": "moments", "values": ["1/1", "0/1", "1/2", "0/1", "3/4", "0/1"]})
    result, report = run(runner, tmp_path, ["recurrence", "--u", gaussian, "--nmax", "2"])
    assert result.exit_code == 0, result.output
    assert report["beta"] == ["0/1"] * 3
    assert report["gamma"] == ["1/2", "1/1"]


def float_moments(report):
    return [float(w) for w in report["moments"]]


@pytest.mark.parametrize("spec,expected", [
    ({"type": "griffin", "M": 1, "t": 0, "c": 0}, [1, 0, 0.5, 0, 0.75]),
    # e^{-(x - 1/2)^2} on the whole line
    ({"type": "griffin", "M": 1, "t": 1, "c": 0}, [1, 0.5, 0.75]),
    ({"type": "griffin", "r0": 0, "r1": 0, "s1": "1/2", "s2": 1}, [1, 0, 0.5, 0, 0.75]),
])
def test_moments_of_griffin_specs(runner, tmp_path, spec_file, spec, expected):
    path = spec_file(spec)
    result, report = run(runner, tmp_path, [
        "moments", "--u", path, "--backend", "float", "--nmax", str(len(expected) - 1),
    ])
    assert result.exit_code == 0, result.output
    assert float_moments(report) == pytest.approx(expected, abs=1e-12)


def test_griffin_spec_rejects_nonintegrable_weight(runner, tmp_path, spec_file):
    path = spec_file({"type": "griffin", "M": 1, "t": 0, "c": -1})
    result, report = run(runner, tmp_path, ["moments", "--u", path, "--backend", "float"])
    assert result.exit_code == 6
    assert report is None


def test_griffin_spec_needs_all_weight_parameters(runner, tmp_path, spec_file):
    path = spec_file({"type": "griffin", "M": 1, "t": 0})
    result, _ = run(runner, tmp_path, ["moments", "--u", path, "--backend", "float"])
    assert result.exit_code == 6


def test_moments(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, ["moments", "--u", hermite, "--nmax", "4"])
    assert result.exit_code == 0, result.output
    assert report["moments"] == ["1/1", "0/1", "1/2", "0/1", "3/4"]


# ------------------------------------------------------------------
# coherence-check
# ------------------------------------------------------------------

def test_coherence_check_holds(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "coherence-check", "--u", hermite, "--v", hermite, "--pi", "0,1",
        "--M", "1", "--m", "1", "--k", "0", "--nmax", "6",
    ])
    assert result.exit_code == 0, result.output
    assert report["verdict"]["holds"]
    assert report["discovered"] == {"M": 1, "N": 1}
    assert report["parameters"]["pi"] == ["0/1", "1/1"]


def test_coherence_check_unrelated_pair(runner, tmp_path, hermite, laguerre):
    result, report = run(runner, tmp_path, [
        "coherence-check", "--u", hermite, "--v", laguerre, "--M", "0", "--m", "0", "--k", "0",
        "--nmax", "4",
    ])
    assert result.exit_code == 3
    assert not report["verdict"]["holds"]


def test_coherence_check_index_too_small(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "coherence-check", "--u", hermite, "--v", hermite, "--pi", "0,1",
        "--M", "0", "--m", "1", "--k", "0", "--nmax", "4",
    ])
    assert result.exit_code == 3
    assert report["verdict"]["violation"]["n"] == 0
    assert report["verdict"]["violation"]["j"] == 0


def test_non_monic_pi_is_normalized(runner, tmp_path, hermite, coherent_home):
    result, report = run(runner, tmp_path, [
        "coherence-check", "--u", hermite, "--v", hermite, "--pi", "0,2",
        "--M", "1", "--m", "1", "--k", "0", "--nmax", "4",
    ])
    assert result.exit_code == 0, result.output
    assert report["parameters"]["pi"] == ["0/1", "1/1"]
    assert "not monic" in (coherent_home / "audit.log").read_text()


def test_degree_mismatch_is_rejected(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "coherence-check", "--u", hermite, "--v", hermite, "--pi", "0,1", "--N", "2",
        "--M", "1", "--m", "1", "--k", "0",
    ])
    assert result.exit_code == 6
    assert report is None


# ------------------------------------------------------------------
# semiclassical
# ------------------------------------------------------------------

def certificate(report, name):
    return next(c for c in report["certificates"] if c["functional"] == name)


def test_semiclassical_hermite_self_pair(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "semiclassical", "--u", hermite, "--v", hermite, "--M", "0", "--m", "1", "--k", "0",
        "--nmax", "4",
    ])
    assert result.exit_code == 0, result.output
    assert report["case"] == "kzero"
    assert report["verified"]
    u = certificate(report, "u")
    assert (u["Phi"], u["Psi"]) == (["1/1"], ["0/1", "-2/1"])
    assert u["class_bound"] == 0
    assert all(check["holds"] for check in report["lemma"])
    assert report["degree_law_violations"] == []


def test_semiclassical_pi_x(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "semiclassical", "--u", hermite, "--v", hermite, "--pi", "0,1",
        "--M", "1", "--m", "1", "--k", "0", "--nmax", "4",
    ])
    assert result.exit_code == 0, result.output
    assert report["theorem_bounds"] == {"u": 1, "v": 2}
    assert certificate(report, "u")["class_bound"] == 1


def test_semiclassical_warns_once_for_non_monic_pi(runner, tmp_path, hermite, coherent_home):
    result, report = run(runner, tmp_path, [
        "semiclassical", "--u", hermite, "--v", hermite, "--pi", "0,2",
        "--M", "1", "--m", "1", "--k", "0", "--nmax", "4",
    ])
    assert result.exit_code == 0, result.output
    assert report["parameters"]["pi"] == ["0/1", "1/1"]
    assert (coherent_home / "audit.log").read_text().count("not monic") == 1


def test_semiclassical_forced_route(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "semiclassical", "--u", hermite, "--v", hermite, "--pi", "0,1",
        "--M", "1", "--m", "1", "--k", "0", "--nmax", "4", "--theorem", "m-ge",
    ])
    assert result.exit_code == 0, result.output
    assert report["case"] == "m_ge_k_plus_N"
    assert report["system"]["solvable"]


def test_semiclassical_degenerate_system(runner, tmp_path, hermite):
    result, report = run(runner, tmp_path, [
        "semiclassical", "--u", hermite, "--v", hermite, "--pi", "0,1",
        "--M", "1", "--m", "0", "--k", "1", "--nmax", "4",
    ])
    assert result.exit_code == 5
    assert report["hypothesis_failed"]


def test_semiclassical_requires_coherence(runner, tmp_path, hermite, laguerre):
    result, report = run(runner, tmp_path, [
        "semiclassical", "--u", hermite, "--v", laguerre, "--M", "0", "--m", "1", "--k", "0",
        "--nmax", "3",
    ])
    assert result.exit_code == 3
    assert report is None


# ------------------------------------------------------------------
# griffin
# ------------------------------------------------------------------

def test_griffin_hermite(runner, tmp_path):
    result, report = run(runner, tmp_path, [
        "griffin", "--r0", "0", "--r1", "0", "--s1", "1/2", "--s2", "1", "--nmax", "6",
    ])
    assert result.exit_code == 0, result.output
    assert report["passed"]
    assert report["params"]["a"] == "1/1"
    assert report["backend"]["backend"] == "float"


def test_griffin_parameter_gate(runner, tmp_path):
    result, report = run(runner, tmp_path, [
        "griffin", "--r0", "0", "--r1", "0", "--s1=-1", "--s2", "1",
    ])
    assert result.exit_code == 6
    assert report is None


def test_griffin_rejects_exact_backend(runner, tmp_path):
    result, _ = run(runner, tmp_path, [
        "griffin", "--r0", "0", "--r1", "0", "--s1", "1/2", "--s2", "1", "--backend", "exact",
    ])
    assert result.exit_code == 6


# ------------------------------------------------------------------
# config
# ------------------------------------------------------------------

def test_config_round_trip(runner, tmp_path, hermite, coherent_home):
    result = runner.invoke(cli, ["config", "status"])
    assert result.exit_code == 0
    assert "No defaults stored" in result.output

    result = runner.invoke(cli, ["config", "setup", "--backend", "float", "--nmax", "3"])
    assert result.exit_code == 0, result.output
    assert (coherent_home / "config.yaml").exists()

    result = runner.invoke(cli, ["config", "status"])
    assert "Backend: float" in result.output
    assert "nmax: 3" in result.output

    result, report = run(runner, tmp_path, ["recurrence", "--u", hermite])
    assert result.exit_code == 0, result.output
    assert report["backend"]["backend"] == "float"
    assert report["n_max"] == 3

    result = runner.invoke(cli, ["config", "delete", "--yes"])
    assert result.exit_code == 0
    assert not (coherent_home / "config.yaml").exists()


def test_config_setup_rejects_bad_nmax(runner):
    result = runner.invoke(cli, ["config", "setup", "--nmax", "-2"])
    assert result.exit_code == 1
