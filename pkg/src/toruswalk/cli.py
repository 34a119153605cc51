"""Scenario-driven command line: classify, simulate, test, report.

Every command takes a scenario (``--builtin NAME`` or ``--scenario FILE``)
plus overrides for depth, samples, seed, pmax and anchor.  Tabular output is
CSV with a single ``#``-prefixed header comment line; ``--out DIR`` writes
files, otherwise tables go to stdout.  Exit codes: 0 all tests passed, 1 some
test failed, 2 usage / parse / IO error.

Reports are byte-identical for identical (scenario, flags, seed): timing goes
to stderr, never into report output.  ``TORUSWALK_WORKERS`` caps the kernel
thread count and ``TORUSWALK_NUMBA=0`` selects the pure-numpy kernels; both
affect speed only.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from ._kernels import BACKEND
from .classify import Regime, classify
from .measures import Atoms, Dirac, IncompatiblePairError, NotOnCyclicGridError, _collapse
from .scenarios import (
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    builtin_scenarios,
    get_builtin,
    load_scenario,
    parse_anchor,
    with_overrides,
)
from .sequences import IidTail
from .simulate import (
    ChainConfig,
    DeterministicAnchor,
    UniformAnchor,
    centered_products,
    convolution_power,
    cross_character_bias,
    exact_cyclic_law,
    mixture_pair,
    simulate,
    skeleton,
    SkeletonConfig,
    strong_limit,
    translate,
    truncation_tail_variance,
    tv_distance_on_grid,
    window_bias,
)
from .stats import (
    bucket_uniformity,
    ecf,
    ecf_threshold,
    independence,
    joint_character,
    measurability_check,
    noise_recovery_residual,
    pathwise_determinism_residual,
    recursion_residual,
    telescope_residual,
    two_sample_ecf_distance,
    uniformity,
)
from .torus import circle_dist, frac_scalar

MIXTURE_LAW = Atoms([(0, "1/2"), ("1/2", "1/2")])
CYCLIC_ORDER_CAP = 4096


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return format(x, ".12g")
    return str(x)


def _write_csv(fh, columns, rows):
    fh.write("# " + ",".join(columns) + "\n")
    for row in rows:
        fh.write(",".join(_fmt(c) for c in row) + "\n")


def _emit(args, filename, columns, rows, text_lines=None):
    """Write a table to --out/<filename> or stdout, honoring --format."""
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, filename), "w", encoding="utf-8") as fh:
            _write_csv(fh, columns, rows)
        if text_lines:
            for line in text_lines:
                print(line)
    elif args.format == "csv":
        _write_csv(sys.stdout, columns, rows)
    else:
        for line in text_lines or []:
            print(line)
        if text_lines is None:
            _write_csv(sys.stdout, columns, rows)


# ---------------------------------------------------------------------------
# suite


@dataclass(frozen=True)
class SuiteRow:
    name: str
    statistic: float
    threshold: float
    passed: bool


@dataclass
class RunReport:
    scenario: str
    regime: str
    generator: int
    rows: list[SuiteRow]
    wall_time: float

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.rows)


def _det_anchor_value(anchor) -> float:
    return anchor.v if isinstance(anchor, DeterministicAnchor) else 0.0


def _cyclic_order(seq, depth, anchor):
    """Smallest grid order carrying the whole window, or None."""
    if not isinstance(anchor, DeterministicAnchor):
        return None
    q = 1
    for k in range(-depth, 1):
        mu = _collapse(seq.measure_at(k))
        if isinstance(mu, Dirac):
            exacts = (mu.exact,)
        elif isinstance(mu, Atoms):
            exacts = mu.exact
        else:
            return None
        for ex in exacts:
            if ex is None:
                return None
            q = math.lcm(q, ex.denominator)
        if q > CYCLIC_ORDER_CAP:
            return None
    v = anchor.v * q
    if v != round(v) or float(round(v)) / q != anchor.v:
        return None
    return q


def _joint_bias(seq, depth, p, terms):
    """Finite-window bound on a joint character with a deterministic anchor."""
    qs = {j: q for q, j in terms}
    base = 1.0
    for k in range(-depth, 1):
        base *= abs(seq.measure_at(k).fourier(p - qs.get(k, 0)))
        if base == 0.0:
            return 0.0
    return base


def run_suite(scenario: Scenario, extended: bool = False) -> RunReport:
    """Classify, then run the regime-appropriate test battery."""
    t0 = time.perf_counter()
    seq = scenario.sequence
    d = scenario.defaults
    depth, n, seed = d.depth, d.samples, d.seed
    thr = ecf_threshold(n)
    rows: list[SuiteRow] = []

    result = classify(seq, d.pmax)
    ens = simulate(ChainConfig(seq, depth, d.anchor, n, seed))

    # pathwise algebra holds on every ensemble
    r = recursion_residual(ens)
    rows.append(SuiteRow("pathwise_recursion", r, 0.0, r == 0.0))
    r = telescope_residual(ens)
    rows.append(SuiteRow("pathwise_telescope", r, 1e-9, r <= 1e-9))
    r = noise_recovery_residual(ens)
    rows.append(SuiteRow("noise_recovery", r, 1e-12, r <= 1e-12))

    if isinstance(d.anchor, DeterministicAnchor):
        g = 0.37
        shifted = simulate(
            ChainConfig(seq, depth, DeterministicAnchor(frac_scalar(d.anchor.v + g)), n, seed)
        )
        r = float(np.max(np.abs(translate(ens, g).states - shifted.states)))
        rows.append(SuiteRow("translate_equals_shifted_anchor", r, 0.0, r == 0.0))

    ens_a, ens_b = mixture_pair(seq, MIXTURE_LAW, depth, n, seed)
    dist = two_sample_ecf_distance(ens_a.eta0, ens_b.eta0, 3)
    rows.append(SuiteRow("mixture_ecf_distance", dist, 2 * thr, dist <= 2 * thr))

    q = _cyclic_order(seq, depth, d.anchor)
    if q is not None:
        law = exact_cyclic_law(seq, depth, d.anchor.v, q)
        tv = tv_distance_on_grid(ens.eta0, law)
        tv_thr = 3.0 * math.sqrt(q / n)
        rows.append(SuiteRow("exact_oracle_tv", tv, tv_thr, tv <= tv_thr))

    if result.regime is Regime.UNIQUENESS:
        rows += _battery_uniqueness(seq, d, ens, result, extended)
    elif result.regime is Regime.STRONG:
        rows += _battery_strong(seq, d, ens, result)
    else:
        rows += _battery_neither(seq, d, ens, result)

    wall = time.perf_counter() - t0
    return RunReport(
        scenario=scenario.name,
        regime=str(result.regime),
        generator=result.generator,
        rows=rows,
        wall_time=wall,
    )


def _window_js(depth):
    return [j for j in (0, -5, -10) if j >= -depth]


def _battery_uniqueness(seq, d, ens, result, extended):
    depth, n, seed = d.depth, d.samples, d.seed
    thr = ecf_threshold(n)
    rows = []

    bias = max(window_bias(seq, depth, p, d.anchor) for p in range(1, 6))
    rep = uniformity(ens.eta0, 5, bias=bias)
    rows.append(SuiteRow("uniformity_eta0", rep.max_modulus, thr + bias, rep.passed))

    js = _window_js(depth)
    biasfn = lambda p, q, j: cross_character_bias(seq, depth, p, q, j, d.anchor)
    rep_i = independence(ens.eta0, {j: ens.noise_at(j) for j in js}, [1, 2], [1, 2], bias=biasfn)
    rows.append(
        SuiteRow("independence_cross_characters", rep_i.max_modulus, thr, rep_i.passed)
    )

    cp = centered_products(seq, 0, -depth, n, seed)
    bias_c = max(window_bias(seq, depth, p, DeterministicAnchor(0.0)) for p in range(1, 4))
    rep_c = uniformity(cp.samples, 3, bias=bias_c)
    rows.append(SuiteRow("centered_product_decay", rep_c.max_modulus, thr + bias_c, rep_c.passed))

    l1 = -depth + 10 if depth > 10 else -max(1, depth // 2)
    cp1 = centered_products(seq, 0, l1, n, seed)
    dist = two_sample_ecf_distance(cp1.samples, cp.samples, 3)
    bias_pair = sum(
        max(window_bias(seq, -l, p, DeterministicAnchor(0.0)) for p in range(1, 4))
        for l in (l1, -depth)
    )
    rows.append(
        SuiteRow("two_depth_convergence", dist, 2 * thr + bias_pair, dist <= 2 * thr + bias_pair)
    )

    det = pathwise_determinism_residual(ens)
    rows.append(
        SuiteRow("sigma_field_non_interchange", det, 1e-9, det <= 1e-9 and rep_i.passed)
    )

    if extended:
        worst = 0.0
        js2 = [j for j in (0, -5) if j >= -depth]
        for p in (1, 2):
            for j1 in js2:
                for j2 in js2:
                    if j2 >= j1:
                        continue
                    terms = [(1, ens.noise_at(j1)), (1, ens.noise_at(j2))]
                    m = joint_character(ens.eta0, p, terms)
                    b = _joint_bias(seq, depth, p, [(1, j1), (1, j2)])
                    worst = max(worst, m - b)
        rows.append(SuiteRow("joint_characters_m3", worst, thr, worst <= thr))
    return rows


def _battery_strong(seq, d, ens, result):
    depth, n, seed = d.depth, d.samples, d.seed
    thr = ecf_threshold(n)
    rows = []
    v = _det_anchor_value(d.anchor)

    # centered truncations share draws under one seed, so the a.s. Cauchy
    # property becomes a pathwise displacement test with a Chebyshev bound
    cp1 = centered_products(seq, 0, -20, n, seed)
    cp2 = centered_products(seq, 0, -30, n, seed)
    exceed = float(np.mean(circle_dist(cp1.samples, cp2.samples) > 0.01))
    bound = max(0.005, 2.0 * truncation_tail_variance(seq, 20) / 0.01**2)
    rows.append(SuiteRow("strong_limit_cauchy", exceed, bound, exceed <= bound))

    ens_det = (
        ens
        if isinstance(d.anchor, DeterministicAnchor)
        else simulate(ChainConfig(seq, depth, DeterministicAnchor(v), n, seed))
    )
    rl = strong_limit(seq, v, depth, n, seed, check_regime=False)
    resid = float(np.max(circle_dist(ens_det.eta0, rl.samples)))
    rows.append(SuiteRow("strong_reconstruction", resid, 1e-9, resid <= 1e-9))

    tail = seq.tail
    if isinstance(tail, IidTail) and isinstance(_collapse(tail.law), Dirac):
        rep = independence(ens_det.eta0, {0: ens_det.noise_at(0)}, [1], [1])
        rows.append(
            SuiteRow("dependence_exhibit", rep.max_modulus, thr, not rep.passed)
        )
    return rows


def _battery_neither(seq, d, ens, result):
    depth, n, seed = d.depth, d.samples, d.seed
    rows = []
    g = result.generator

    ens_u = (
        ens
        if isinstance(d.anchor, UniformAnchor)
        else simulate(ChainConfig(seq, depth, UniformAnchor(), n, seed))
    )
    b = bucket_uniformity(ens_u.eta0, g)
    rows.append(SuiteRow("bucket_uniformity", b.statistic, b.critical, b.passed))

    m = measurability_check(seq, g, n, seed, depth=depth)
    rows.append(SuiteRow("measurability_on_coset", m.max_discrepancy, m.tolerance, m.passed))

    m_neg = measurability_check(seq, g, n, seed, depth=depth, shift=1.0 / (2 * g))
    rows.append(
        SuiteRow("measurability_negative_control", m_neg.max_discrepancy, m_neg.tolerance, not m_neg.passed)
    )
    return rows


def _emit_plot_data(args, scenario, ens, result):
    seq = scenario.sequence
    d = scenario.defaults
    os.makedirs(args.out, exist_ok=True)

    rows = []
    depths = [l for l in range(-5, -d.depth - 1, -5)] or [-d.depth]
    for l in depths:
        cp = centered_products(seq, 0, l, d.samples, d.seed)
        for p in (1, 2, 3):
            model = window_bias(seq, -l, p, DeterministicAnchor(0.0))
            rows.append((-l, p, abs(ecf(cp.samples, p)), model))
    with open(os.path.join(args.out, "ecf_decay.csv"), "w", encoding="utf-8") as fh:
        _write_csv(fh, ["depth", "p", "empirical_modulus", "model_modulus"], rows)

    counts, edges = np.histogram(ens.eta0, bins=50, range=(0.0, 1.0))
    hist_rows = [(edges[i], edges[i + 1], int(counts[i])) for i in range(50)]
    with open(os.path.join(args.out, "histogram.csv"), "w", encoding="utf-8") as fh:
        _write_csv(fh, ["bin_lo", "bin_hi", "count"], hist_rows)

    if isinstance(seq.tail, IidTail):
        table = convolution_power(seq.tail.law, 200, 10)
        conv_rows = [
            (p, nn, table.table[p - 1, nn - 1])
            for p in range(1, 11)
            for nn in range(1, 201)
        ]
        with open(os.path.join(args.out, "convpower.csv"), "w", encoding="utf-8") as fh:
            _write_csv(fh, ["p", "n", "modulus_power"], conv_rows)


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(parser):
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--scenario", metavar="FILE", help="scenario JSON file")
    src.add_argument("--builtin", metavar="NAME", help="built-in scenario name (see `list`)")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed override")
    parser.add_argument("--samples", "-n", type=int, default=None, help="sample count override")
    parser.add_argument("--depth", "-N", type=int, default=None, help="window depth override")
    parser.add_argument("--pmax", type=int, default=None, help="frequency scan bound override")
    parser.add_argument("--anchor", default=None, help="anchor: det:<x> | uniform | law:<json>")
    parser.add_argument("--out", metavar="DIR", default=None, help="write CSV files here")
    parser.add_argument("--format", choices=("csv", "text"), default="text", help="stdout format")


def _resolve(args) -> Scenario:
    if args.scenario:
        scenario = load_scenario(args.scenario)
    elif args.builtin:
        scenario = get_builtin(args.builtin)
    else:
        raise ScenarioParseError("need --scenario FILE or --builtin NAME")
    anchor = parse_anchor(args.anchor) if args.anchor else None
    return with_overrides(
        scenario,
        depth=args.depth,
        samples=args.samples,
        seed=args.seed,
        pmax=args.pmax,
        anchor=anchor,
    )


def _read_samples_csv(path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ScenarioParseError(f"cannot read samples from {path}: {exc}") from exc
    return data[:, -1]


# ---------------------------------------------------------------------------
# commands


def _cmd_list(args) -> int:
    for name, sc in sorted(builtin_scenarios().items()):
        print(f"{name}: {sc.description}")
    return 0


def _cmd_classify(args) -> int:
    scenario = _resolve(args)
    result = classify(scenario.sequence, scenario.defaults.pmax)
    ev = result.evidence
    rows = []
    for p in sorted(ev.per_p):
        v = ev.per_p[p]
        rows.append(
            (
                p,
                v.finite,
                v.zero_factor_count if v.zero_factor_count is not None else 0,
                v.tail_log_sum if v.tail_log_sum is not None else math.inf,
                v.certified,
            )
        )
    scope = (
        "certified for all p"
        if ev.conclusion_certified
        else f"within scan bound {ev.scan_bound}"
    )
    text = [
        f"scenario: {scenario.name}",
        f"regime: {result.regime} (generator {result.generator}, {scope})",
        f"fully certified per-frequency: {_fmt(ev.fully_certified)}",
    ]
    if result.centering is not None:
        text.append(f"centering family: {result.centering.family}")
    for p, member, zf, s, cert in rows:
        text.append(
            f"  p={p}: member={_fmt(member)} zero_factors={zf} log_sum={_fmt(s)} certified={_fmt(cert)}"
        )
    _emit(args, "classify.csv", ["p", "member", "zero_factors", "tail_log_sum", "certified"], rows, text)
    return 0


def _cmd_simulate(args) -> int:
    scenario = _resolve(args)
    d = scenario.defaults
    ens = simulate(ChainConfig(scenario.sequence, d.depth, d.anchor, d.samples, d.seed))
    rows = [
        (i, ens.anchor_draws[i], ens.eta0[i])
        for i in range(d.samples)
    ]
    moduli = [abs(ecf(ens.eta0, p)) for p in range(1, 6)]
    text = [
        f"scenario: {scenario.name}",
        f"depth {d.depth}, samples {d.samples}, seed {d.seed}, backend {BACKEND}",
        "eta0 ECF moduli p=1..5: " + ", ".join(_fmt(m) for m in moduli),
    ]
    _emit(args, "samples.csv", ["sample", "anchor", "eta_0"], rows, text)
    return 0


def _cmd_limit(args) -> int:
    scenario = _resolve(args)
    d = scenario.defaults
    v = _det_anchor_value(d.anchor)
    res = strong_limit(scenario.sequence, v, args.truncation, d.samples, d.seed)
    rows = [(i, res.samples[i]) for i in range(d.samples)]
    text = [
        f"scenario: {scenario.name}",
        f"truncation {res.truncation}, shift {_fmt(v)}",
        f"tail variance {_fmt(res.tail_variance)}",
        f"P(displacement > 0.01) <= {_fmt(res.displacement_bound(0.01))}",
    ]
    _emit(args, "limit.csv", ["sample", "value"], rows, text)
    return 0


def _cmd_centered(args) -> int:
    scenario = _resolve(args)
    d = scenario.defaults
    l = args.l if args.l is not None else -d.depth
    res = centered_products(scenario.sequence, args.k, l, d.samples, d.seed)
    rows = [(i, res.samples[i]) for i in range(d.samples)]
    text = [
        f"scenario: {scenario.name}",
        f"window k={res.k}, l={res.l}, centering {_fmt(res.alpha)}"
        + ("" if res.constructive else " (no constructive centering; centered by 0)"),
        "ECF moduli p=1..3: " + ", ".join(_fmt(abs(ecf(res.samples, p))) for p in (1, 2, 3)),
    ]
    _emit(args, "centered.csv", ["sample", "value"], rows, text)
    return 0


def _cmd_convpower(args) -> int:
    scenario = _resolve(args)
    tail = scenario.sequence.tail
    if not isinstance(tail, IidTail):
        print("convpower needs an iid tail scenario", file=sys.stderr)
        return 2
    table = convolution_power(tail.law, args.nmax, args.pmax_rows)
    rows = [
        (p, nn, table.table[p - 1, nn - 1])
        for p in range(1, args.pmax_rows + 1)
        for nn in range(1, args.nmax + 1)
    ]
    text = [f"scenario: {scenario.name}", f"verdict: {table.verdict.value}"]
    for p in range(1, args.pmax_rows + 1):
        text.append(
            f"  p={p}: |fourier|={_fmt(float(table.moduli[p - 1]))}"
            + (" (modulus one)" if table.row_modulus_one[p - 1] else "")
        )
    _emit(args, "convpower.csv", ["p", "n", "modulus_power"], rows, text)
    return 0


def _cmd_skeleton(args) -> int:
    n = args.samples if args.samples is not None else 100_000
    seed = args.seed if args.seed is not None else 42
    depth = args.depth if args.depth is not None else 12
    ens = skeleton(SkeletonConfig(depth, n, seed))
    rep_u = uniformity(ens.eta0, 5)
    js = [j for j in (0, -3, -6) if j >= 1 - depth]
    rep_i = independence(ens.eta0, {j: ens.increment_at(j) for j in js}, [1, 2], [1, 2])
    rows = [("uniformity", rep_u.max_modulus, rep_u.rows[0].threshold, rep_u.passed)]
    rows += [
        ("cross_character", r.modulus, r.threshold, r.passed) for r in rep_i.rows
    ]
    passed = rep_u.passed and rep_i.passed
    text = [
        f"skeleton depth {depth}, samples {n}, seed {seed}",
        f"uniformity max modulus {_fmt(rep_u.max_modulus)} (threshold {_fmt(rep_u.rows[0].threshold)})",
        f"cross-character max modulus {_fmt(rep_i.max_modulus)}",
        f"overall: {'pass' if passed else 'FAIL'}",
    ]
    _emit(args, "skeleton.csv", ["test", "statistic", "threshold", "pass"], rows, text)
    return 0 if passed else 1


def _cmd_uniformity(args) -> int:
    bias = 0.0
    if args.input:
        samples = _read_samples_csv(args.input)
        name = args.input
    else:
        scenario = _resolve(args)
        d = scenario.defaults
        ens = simulate(ChainConfig(scenario.sequence, d.depth, d.anchor, d.samples, d.seed))
        samples = ens.eta0
        if args.window_bias:
            bias = max(
                window_bias(scenario.sequence, d.depth, p, d.anchor)
                for p in range(1, args.ptest + 1)
            )
        name = scenario.name
    rep = uniformity(samples, args.ptest, bias=bias)
    rows = [(r.p, r.modulus, r.threshold, r.passed) for r in rep.rows]
    text = [f"uniformity of {name}: {'pass' if rep.passed else 'FAIL'} (max modulus {_fmt(rep.max_modulus)})"]
    _emit(args, "uniformity.csv", ["p", "modulus", "threshold", "pass"], rows, text)
    return 0 if rep.passed else 1


def _cmd_independence(args) -> int:
    scenario = _resolve(args)
    d = scenario.defaults
    ens = simulate(ChainConfig(scenario.sequence, d.depth, d.anchor, d.samples, d.seed))
    js = _window_js(d.depth)
    biasfn = None
    if args.window_bias:
        biasfn = lambda p, q, j: cross_character_bias(scenario.sequence, d.depth, p, q, j, d.anchor)
    rep = independence(ens.eta0, {j: ens.noise_at(j) for j in js}, [1, 2], [1, 2], bias=biasfn)
    rows = [(r.p, r.q, r.j, r.modulus, r.threshold, r.passed) for r in rep.rows]
    text = [
        f"independence of {scenario.name}: {'pass' if rep.passed else 'FAIL'} "
        f"(max modulus {_fmt(rep.max_modulus)})"
    ]
    _emit(args, "independence.csv", ["p", "q", "j", "modulus", "threshold", "pass"], rows, text)
    return 0 if rep.passed else 1


def _cmd_buckets(args) -> int:
    scenario = _resolve(args)
    d = scenario.defaults
    p = args.p
    if p is None:
        result = classify(scenario.sequence, d.pmax)
        if result.generator < 2:
            print("bucket test needs --p (scenario generator is < 2)", file=sys.stderr)
            return 2
        p = result.generator
    ens = simulate(ChainConfig(scenario.sequence, d.depth, d.anchor, d.samples, d.seed))
    rep = bucket_uniformity(ens.eta0, p)
    rows = [(i, int(rep.counts[i])) for i in range(p)]
    text = [
        f"buckets of {scenario.name} at p={p}: {'pass' if rep.passed else 'FAIL'} "
        f"(chi2 {_fmt(rep.statistic)} vs critical {_fmt(rep.critical)})"
    ]
    _emit(args, "buckets.csv", ["bucket", "count"], rows, text)
    return 0 if rep.passed else 1


def _cmd_measurable(args) -> int:
    scenario = _resolve(args)
    d = scenario.defaults
    result = classify(scenario.sequence, d.pmax)
    rep = measurability_check(
        scenario.sequence, result.generator, d.samples, d.seed, depth=d.depth, shift=args.shift
    )
    rows = [(rep.p, rep.base_anchor, rep.shifted_anchor, rep.max_discrepancy, rep.tolerance, rep.passed)]
    text = [
        f"measurability of {scenario.name} at p={rep.p}: {'pass' if rep.passed else 'FAIL'} "
        f"(max discrepancy {_fmt(rep.max_discrepancy)})"
    ]
    _emit(
        args,
        "measurable.csv",
        ["p", "base_anchor", "shifted_anchor", "max_discrepancy", "tolerance", "pass"],
        rows,
        text,
    )
    return 0 if rep.passed else 1


def _cmd_suite(args) -> int:
    scenario = _resolve(args)
    report = run_suite(scenario, extended=args.extended)
    rows = [(r.name, r.statistic, r.threshold, r.passed) for r in report.rows]
    text = [
        f"scenario: {report.scenario}",
        f"regime: {report.regime} (generator {report.generator})",
    ]
    for r in report.rows:
        mark = "pass" if r.passed else "FAIL"
        text.append(f"  {r.name}: {mark} (statistic {_fmt(r.statistic)}, threshold {_fmt(r.threshold)})")
    text.append(f"overall: {'pass' if report.overall else 'FAIL'}")
    _emit(args, "report.csv", ["test", "statistic", "threshold", "pass"], rows, text)
    if args.out:
        d = scenario.defaults
        ens = simulate(ChainConfig(scenario.sequence, d.depth, d.anchor, d.samples, d.seed))
        result = classify(scenario.sequence, d.pmax)
        _emit_plot_data(args, scenario, ens, result)
    print(f"wall time: {report.wall_time:.2f}s", file=sys.stderr)
    return 0 if report.overall else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toruswalk",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list built-in scenarios")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("classify", help="compute the subgroup generator and regime")
    _add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("simulate", help="simulate a chain ensemble, dump eta_0 samples")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("limit", help="truncated strong-solution samples with error bound")
    _add_common(p)
    p.add_argument("--truncation", "-L", type=int, default=20)
    p.set_defaults(func=_cmd_limit)

    p = sub.add_parser("centered", help="centered partial products over a window")
    _add_common(p)
    p.add_argument("--k", type=int, default=0, help="upper time index (<= 0)")
    p.add_argument("--l", type=int, default=None, help="lower time index (defaults to -depth)")
    p.set_defaults(func=_cmd_centered)

    p = sub.add_parser("convpower", help="Fourier-modulus decay of convolution powers")
    _add_common(p)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--pmax-rows", type=int, default=10, help="frequencies to tabulate")
    p.set_defaults(func=_cmd_convpower)

    p = sub.add_parser("skeleton", help="dyadic-grid skeleton chain tests")
    _add_common(p)
    p.set_defaults(func=_cmd_skeleton)

    p = sub.add_parser("uniformity", help="ECF uniformity test of eta_0")
    _add_common(p)
    p.add_argument("--input", metavar="CSV", help="read samples (last column) instead of simulating")
    p.add_argument("--ptest", type=int, default=5, help="test frequencies 1..ptest")
    p.add_argument(
        "--window-bias",
        action="store_true",
        help="add the finite-window model bias to the threshold",
    )
    p.set_defaults(func=_cmd_uniformity)

    p = sub.add_parser("independence", help="cross-character independence test")
    _add_common(p)
    p.add_argument(
        "--window-bias",
        action="store_true",
        help="add the finite-window model bias to the thresholds",
    )
    p.set_defaults(func=_cmd_independence)

    p = sub.add_parser("buckets", help="chi-square bucket uniformity of floor(p*eta_0)")
    _add_common(p)
    p.add_argument("--p", type=int, default=None, help="bucket count (defaults to the generator)")
    p.set_defaults(func=_cmd_buckets)

    p = sub.add_parser("measurable", help="noise-measurability of frac(p*eta) in regime C3")
    _add_common(p)
    p.add_argument("--shift", type=float, default=None, help="anchor shift (default 1/p)")
    p.set_defaults(func=_cmd_measurable)

    p = sub.add_parser("suite", help="classify and run the full regime battery")
    _add_common(p)
    p.add_argument("--extended", action="store_true", help="include joint-character tests")
    p.set_defaults(func=_cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NotOnCyclicGridError, IncompatiblePairError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
