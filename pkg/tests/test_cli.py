import json
import math

import numpy as np
import pytest

from toruswalk.cli import main, run_suite
from toruswalk.measures import Dirac, Uniform, WrappedGaussian
from toruswalk.scenarios import (
    ScenarioParseError,
    ScenarioValidationError,
    builtin_scenarios,
    get_builtin,
    load_scenario,
    parse_anchor,
)
from toruswalk.sequences import GeometricVariance, IidTail, WrappedGaussianTail
from toruswalk.simulate import DeterministicAnchor, LawAnchor, UniformAnchor


def write_scenario(tmp_path, obj, name="scn.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_builtin_catalog():
    names = set(builtin_scenarios())
    assert {"c1_wrapped_gaussian", "c2_dirac_third", "c3_half_atoms"} <= names
    sc = get_builtin("c1_wrapped_gaussian")
    assert isinstance(sc.sequence.tail, IidTail)
    assert sc.sequence.tail.law == WrappedGaussian(0.0, 0.5)
    sc = get_builtin("c2_dirac_third")
    assert sc.sequence.tail.law == Dirac("1/3")
    sc = get_builtin("c2_geometric_gaussian")
    assert isinstance(sc.sequence.tail, WrappedGaussianTail)
    assert sc.sequence.tail.variances == GeometricVariance(0.25, 0.5)
    with pytest.raises(ScenarioParseError):
        get_builtin("no_such_scenario")


def test_load_scenario_round_trip(tmp_path):
    path = write_scenario(
        tmp_path,
        {
            "name": "custom",
            "sequence": {
                "prefix": {"0": {"type": "dirac", "x": "1/10"}},
                "tail": {
                    "type": "wg",
                    "means": {"kind": "constant", "m": 0.1},
                    "variances": {"kind": "geometric", "c": 0.25, "r": 0.5},
                },
            },
            "defaults": {"depth": 12, "samples": 5000, "seed": 7, "anchor": "det:1/4"},
        },
    )
    sc = load_scenario(path)
    assert sc.name == "custom"
    assert sc.sequence.measure_at(0) == Dirac("1/10")
    assert sc.sequence.measure_at(-3).variance == 0.25 * 0.5**3
    assert sc.defaults.depth == 12 and sc.defaults.seed == 7
    assert sc.defaults.anchor == DeterministicAnchor(0.25)


def test_all_tail_kinds_parse(tmp_path):
    tails = [
        {"type": "iid", "law": {"type": "uniform"}},
        {
            "type": "wg",
            "means": {"kind": "alternating", "m": 0.2},
            "variances": {"kind": "power_law", "c": 1.0, "s": 2.0},
        },
        {
            "type": "wg",
            "means": "zero",
            "variances": {"kind": "constant", "c": 0.5},
        },
        {
            "type": "scaled_density",
            "density": {"type": "piecewise", "breaks": [0, 0.5, 1], "densities": [2, 0]},
        },
    ]
    for i, tail in enumerate(tails):
        sc = load_scenario(write_scenario(tmp_path, {"sequence": {"tail": tail}}, f"t{i}.json"))
        assert sc.sequence.measure_at(-5) is not None
    # scaled tails reject non-piecewise densities
    with pytest.raises(ScenarioValidationError):
        load_scenario(
            write_scenario(
                tmp_path,
                {"sequence": {"tail": {"type": "scaled_density", "density": {"type": "uniform"}}}},
                "bad_tail.json",
            )
        )


def test_exact_rational_strings_parse_exactly(tmp_path):
    path = write_scenario(
        tmp_path,
        {
            "sequence": {
                "tail": {
                    "type": "iid",
                    "law": {"type": "atoms", "points": [[0, "1/2"], ["1/2", "1/2"]]},
                }
            }
        },
    )
    sc = load_scenario(path)
    law = sc.sequence.tail.law
    assert law.all_exact
    assert [str(e) for e in law.exact] == ["0", "1/2"]


def test_parse_errors_have_diagnostics(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"sequence": {')
    with pytest.raises(ScenarioParseError, match="line"):
        load_scenario(str(bad))

    with pytest.raises(ScenarioParseError, match="tail"):
        load_scenario(write_scenario(tmp_path, {"sequence": {}}))

    with pytest.raises(ScenarioParseError, match="unknown measure type"):
        load_scenario(
            write_scenario(
                tmp_path, {"sequence": {"tail": {"type": "iid", "law": {"type": "cauchy"}}}}
            )
        )


def test_validation_errors(tmp_path):
    path = write_scenario(
        tmp_path,
        {
            "sequence": {
                "tail": {
                    "type": "iid",
                    "law": {"type": "atoms", "points": [[0, 0.7], [0.5, 0.7]]},
                }
            }
        },
    )
    with pytest.raises(ScenarioValidationError, match="sum"):
        load_scenario(path)


def test_parse_anchor_forms():
    assert parse_anchor("uniform") == UniformAnchor()
    assert parse_anchor("det:0.25") == DeterministicAnchor(0.25)
    assert parse_anchor("det:1/4") == DeterministicAnchor(0.25)
    a = parse_anchor('law:{"type":"uniform"}')
    assert isinstance(a, LawAnchor) and a.law == Uniform()
    with pytest.raises(ScenarioParseError):
        parse_anchor("banana")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["list"]) == 0
    assert "c3_half_atoms" in capsys.readouterr().out

    assert main(["classify", "--builtin", "c3_half_atoms", "--pmax", "6"]) == 0
    out = capsys.readouterr().out
    assert "C3" in out and "generator 2" in out

    # missing scenario and unknown builtin are usage errors
    assert main(["classify"]) == 2
    assert main(["classify", "--builtin", "nope"]) == 2
    capsys.readouterr()


def test_cli_uniformity_pass_and_fail(tmp_path, capsys):
    code = main(
        ["uniformity", "--builtin", "c1_uniform_iid", "--samples", "2000", "--depth", "3"]
    )
    assert code == 0
    # constant chain fails uniformity: exit 1
    code = main(
        [
            "uniformity",
            "--builtin",
            "c2_dirac_third",
            "--samples",
            "2000",
            "--depth",
            "3",
            "--anchor",
            "det:0",
        ]
    )
    assert code == 1
    capsys.readouterr()


def test_cli_uniformity_from_csv(tmp_path, capsys):
    out = tmp_path / "dump"
    assert (
        main(
            [
                "simulate",
                "--builtin",
                "c1_uniform_iid",
                "--samples",
                "2000",
                "--depth",
                "3",
                "--out",
                str(out),
            ]
        )
        == 0
    )
    samples_csv = out / "samples.csv"
    assert samples_csv.exists()
    first = samples_csv.read_text().splitlines()[0]
    assert first.startswith("# sample,anchor,eta_0")
    assert main(["uniformity", "--input", str(samples_csv)]) == 0
    capsys.readouterr()


def test_cli_measurable_and_buckets(capsys):
    base = ["--builtin", "c3_half_atoms", "--samples", "2000", "--depth", "10"]
    assert main(["measurable", *base]) == 0
    assert main(["measurable", *base, "--shift", "0.25"]) == 1
    assert main(["buckets", *base, "--samples", "20000"]) == 0
    capsys.readouterr()


def test_cli_convpower(capsys):
    assert main(["convpower", "--builtin", "c3_half_atoms", "--nmax", "50"]) == 0
    out = capsys.readouterr().out
    assert "does not converge" in out
    assert main(["convpower", "--builtin", "c2_geometric_gaussian"]) == 2  # not iid
    capsys.readouterr()


def test_cli_law_anchor_and_centered(tmp_path, capsys):
    code = main(
        [
            "simulate",
            "--builtin",
            "c2_geometric_gaussian",
            "--samples",
            "2000",
            "--depth",
            "5",
            "--anchor",
            'law:{"type":"atoms","points":[[0,"1/2"],["1/2","1/2"]]}',
        ]
    )
    assert code == 0
    code = main(
        ["centered", "--builtin", "c2_geometric_gaussian", "--samples", "2000", "--l", "-8"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "centering 0" in out and "no constructive" not in out


def test_cli_independence_dependence_exit(capsys):
    # deterministic C2 chain: cross-characters sit at modulus 1, exit 1
    code = main(
        [
            "independence",
            "--builtin",
            "c2_dirac_third",
            "--samples",
            "2000",
            "--depth",
            "12",
            "--anchor",
            "det:0",
        ]
    )
    assert code == 1
    capsys.readouterr()


def test_cli_suite_extended_and_csv_stdout(capsys):
    code = main(
        [
            "suite",
            "--builtin",
            "c1_uniform_iid",
            "--samples",
            "20000",
            "--depth",
            "12",
            "--extended",
            "--format",
            "csv",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("# test,statistic,threshold,pass")
    assert "joint_characters_m3" in out


def test_cli_report_bytes_reproducible(tmp_path, capsys):
    args = [
        "suite",
        "--builtin",
        "c3_half_atoms",
        "--seed",
        "42",
        "--samples",
        "20000",
        "--depth",
        "10",
    ]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main([*args, "--out", str(out1)]) == 0
    assert main([*args, "--out", str(out2)]) == 0
    assert (out1 / "report.csv").read_bytes() == (out2 / "report.csv").read_bytes()
    assert (out1 / "histogram.csv").read_bytes() == (out2 / "histogram.csv").read_bytes()
    capsys.readouterr()


def test_run_suite_report_shape():
    sc = get_builtin("c2_dirac_third")
    from toruswalk.scenarios import with_overrides

    report = run_suite(with_overrides(sc, samples=20_000, depth=12))
    assert report.regime == "C2" and report.generator == 1
    assert report.overall
    names = [r.name for r in report.rows]
    assert "strong_limit_cauchy" in names and "pathwise_recursion" in names
    assert report.wall_time > 0.0


def test_run_suite_regime_batteries():
    from toruswalk.scenarios import with_overrides

    r1 = run_suite(with_overrides(get_builtin("c1_wrapped_gaussian"), samples=20_000, depth=12))
    assert r1.regime == "C1" and r1.overall
    assert "sigma_field_non_interchange" in [r.name for r in r1.rows]

    r3 = run_suite(with_overrides(get_builtin("c3_half_atoms"), samples=20_000, depth=12))
    assert r3.regime == "C3" and r3.generator == 2 and r3.overall
    names = [r.name for r in r3.rows]
    assert "measurability_on_coset" in names and "bucket_uniformity" in names


def test_plot_data_files(tmp_path, capsys):
    out = tmp_path / "plots"
    code = main(
        [
            "suite",
            "--builtin",
            "c3_half_atoms",
            "--samples",
            "20000",
            "--depth",
            "20",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()

    decay = np.loadtxt(out / "ecf_decay.csv", delimiter=",", comments="#")
    # model modulus never increases with depth at fixed p
    for p in (1, 2, 3):
        col = decay[decay[:, 1] == p]
        order = np.argsort(col[:, 0])
        model = col[order, 3]
        assert (np.diff(model) <= 1e-15).all()
    # at p = 2 the half-atoms factor has modulus one: the model row stays 1
    assert (decay[decay[:, 1] == 2][:, 3] == 1.0).all()

    hist = np.loadtxt(out / "histogram.csv", delimiter=",", comments="#")
    n = 20_000
    assert hist[:, 2].sum() == n
    # uniform-anchored chain: each of the 50 bins within 4 sigma of n/50
    expect = n / 50
    assert (np.abs(hist[:, 2] - expect) <= 4 * math.sqrt(expect)).all()

    conv = np.loadtxt(out / "convpower.csv", delimiter=",", comments="#")
    assert (conv[conv[:, 0] == 2][:, 2] == 1.0).all()
