"""Scenario files: named noise sequences plus run defaults.

A scenario is a JSON object::

    {
      "name": "my_scenario",
      "sequence": {
        "prefix": {"0": {"type": "dirac", "x": "1/10"}},
        "tail": {"type": "iid", "law": {"type": "uniform"}}
      },
      "defaults": {"depth": 30, "samples": 100000, "seed": 42,
                   "pmax": 64, "anchor": "det:0"}
    }

Measure literals: ``{"type": "dirac", "x": ...}``,
``{"type": "atoms", "points": [[loc, weight], ...]}``,
``{"type": "wrapped_gaussian", "mean": ..., "variance": ...}``,
``{"type": "uniform"}``, ``{"type": "piecewise", "breaks": [...],
"densities": [...]}``.  Locations and weights accept exact rational strings
such as ``"1/3"``.

Tails: ``{"type": "iid", "law": <measure>}``;
``{"type": "wg", "means": "zero" | {"kind": "constant", "m": ...} |
{"kind": "alternating", "m": ...}, "variances": {"kind": "geometric",
"c": ..., "r": ...} | {"kind": "power_law", "c": ..., "s": ...} |
{"kind": "constant", "c": ...}}``;
``{"type": "scaled_density", "density": <piecewise measure>}``.

Anchors: ``"det:<x>"``, ``"uniform"``, or ``"law:<measure json>"``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

from .measures import (
    Atoms,
    Dirac,
    PiecewiseDensity,
    TorusMeasure,
    Uniform,
    WrappedGaussian,
)
from .sequences import (
    AlternatingMean,
    ConstantMean,
    ConstantVariance,
    GeometricVariance,
    IidTail,
    MeasureSequence,
    PowerLawVariance,
    ScaledDensityTail,
    WrappedGaussianTail,
    ZeroMean,
)
from .simulate import Anchor, DeterministicAnchor, LawAnchor, UniformAnchor

__all__ = [
    "Scenario",
    "ScenarioDefaults",
    "ScenarioParseError",
    "ScenarioValidationError",
    "load_scenario",
    "parse_scenario",
    "parse_anchor",
    "builtin_scenarios",
    "get_builtin",
    "with_overrides",
]


class ScenarioParseError(ValueError):
    """The scenario file is not valid JSON or misses required structure."""


class ScenarioValidationError(ValueError):
    """The scenario parses but violates a measure or sequence invariant."""


@dataclass(frozen=True)
class ScenarioDefaults:
    depth: int = 30
    samples: int = 100_000
    seed: int = 42
    pmax: int = 64
    anchor: Anchor = DeterministicAnchor(0.0)

    def __post_init__(self):
        if min(self.depth, self.samples, self.pmax) < 1:
            raise ScenarioValidationError("depth, samples and pmax must be positive")


@dataclass(frozen=True)
class Scenario:
    name: str
    sequence: MeasureSequence
    defaults: ScenarioDefaults
    description: str = ""


def _parse_measure(obj, where: str) -> TorusMeasure:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ScenarioParseError(f"{where}: measure must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "dirac":
            return Dirac(obj["x"])
        if kind == "atoms":
            return Atoms([(p[0], p[1]) for p in obj["points"]])
        if kind == "wrapped_gaussian":
            return WrappedGaussian(float(obj["mean"]), float(obj["variance"]))
        if kind == "uniform":
            return Uniform()
        if kind == "piecewise":
            return PiecewiseDensity(obj["breaks"], obj["densities"])
    except KeyError as exc:
        raise ScenarioParseError(f"{where}: missing field {exc} for measure type '{kind}'") from exc
    except ValueError as exc:
        raise ScenarioValidationError(f"{where}: {exc}") from exc
    raise ScenarioParseError(f"{where}: unknown measure type '{kind}'")


def _parse_means(obj, where: str):
    if obj in (None, "zero"):
        return ZeroMean()
    if isinstance(obj, dict):
        kind = obj.get("kind")
        if kind == "zero":
            return ZeroMean()
        if kind == "constant":
            return ConstantMean(float(obj["m"]))
        if kind == "alternating":
            return AlternatingMean(float(obj["m"]))
    raise ScenarioParseError(f"{where}: unknown means rule {obj!r}")


def _parse_variances(obj, where: str):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ScenarioParseError(f"{where}: variances must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "geometric":
            return GeometricVariance(float(obj["c"]), float(obj["r"]))
        if kind == "power_law":
            return PowerLawVariance(float(obj["c"]), float(obj["s"]))
        if kind == "constant":
            return ConstantVariance(float(obj["c"]))
    except KeyError as exc:
        raise ScenarioParseError(f"{where}: missing field {exc} for variance kind '{kind}'") from exc
    except ValueError as exc:
        raise ScenarioValidationError(f"{where}: {exc}") from exc
    raise ScenarioParseError(f"{where}: unknown variance kind '{kind}'")


def _parse_tail(obj, where: str):
    if not isinstance(obj, dict) or "type" not in obj:
        raise ScenarioParseError(f"{where}: tail must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "iid":
        return IidTail(_parse_measure(obj.get("law"), f"{where}.law"))
    if kind == "wg":
        return WrappedGaussianTail(
            _parse_means(obj.get("means"), f"{where}.means"),
            _parse_variances(obj.get("variances"), f"{where}.variances"),
        )
    if kind == "scaled_density":
        density = _parse_measure(obj.get("density"), f"{where}.density")
        if not isinstance(density, PiecewiseDensity):
            raise ScenarioValidationError(f"{where}.density: scaled tails need a piecewise density")
        return ScaledDensityTail(density)
    raise ScenarioParseError(f"{where}: unknown tail type '{kind}'")


def _parse_sequence(obj, where: str) -> MeasureSequence:
    if not isinstance(obj, dict) or "tail" not in obj:
        raise ScenarioParseError(f"{where}: sequence needs a 'tail' field")
    prefix = {}
    for key, mobj in (obj.get("prefix") or {}).items():
        try:
            k = int(key)
        except ValueError as exc:
            raise ScenarioParseError(f"{where}.prefix: key {key!r} is not an integer") from exc
        prefix[k] = _parse_measure(mobj, f"{where}.prefix[{key}]")
    tail = _parse_tail(obj["tail"], f"{where}.tail")
    try:
        return MeasureSequence(tail, prefix=prefix)
    except ValueError as exc:
        raise ScenarioValidationError(f"{where}: {exc}") from exc


def parse_anchor(spec: str) -> Anchor:
    """Parse an anchor flag: det:<x> | uniform | law:<measure json>."""
    if spec == "uniform":
        return UniformAnchor()
    if spec.startswith("det:"):
        body = spec[4:]
        try:
            d = Dirac(body if "/" in body else float(body))
        except ValueError as exc:
            raise ScenarioParseError(f"bad anchor point {body!r}") from exc
        return DeterministicAnchor(d.x)
    if spec.startswith("law:"):
        try:
            obj = json.loads(spec[4:])
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(f"bad anchor law JSON: {exc}") from exc
        return LawAnchor(_parse_measure(obj, "anchor law"))
    raise ScenarioParseError(f"unknown anchor spec {spec!r} (want det:<x> | uniform | law:<json>)")


def _parse_defaults(obj, where: str) -> ScenarioDefaults:
    obj = obj or {}
    base = ScenarioDefaults()
    anchor = base.anchor
    if "anchor" in obj:
        anchor = parse_anchor(obj["anchor"])
    try:
        return ScenarioDefaults(
            depth=int(obj.get("depth", base.depth)),
            samples=int(obj.get("samples", base.samples)),
            seed=int(obj.get("seed", base.seed)),
            pmax=int(obj.get("pmax", base.pmax)),
            anchor=anchor,
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioParseError(f"{where}: bad defaults: {exc}") from exc


def parse_scenario(obj: dict, fallback_name: str = "scenario") -> Scenario:
    """Build a validated Scenario from a decoded JSON object."""
    if not isinstance(obj, dict):
        raise ScenarioParseError("scenario must be a JSON object")
    name = obj.get("name", fallback_name)
    if "sequence" not in obj:
        raise ScenarioParseError("scenario needs a 'sequence' field")
    seq = _parse_sequence(obj["sequence"], "sequence")
    defaults = _parse_defaults(obj.get("defaults"), "defaults")
    return Scenario(name=name, sequence=seq, defaults=defaults)


def load_scenario(path: str) -> Scenario:
    """Load and validate a scenario file, with line/field diagnostics."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    fallback = os.path.splitext(os.path.basename(path))[0]
    return parse_scenario(obj, fallback_name=fallback)


# ---------------------------------------------------------------------------
# built-in scenarios: one per regime family exercised by the test batteries


def _builtin(name, tail, description, *, prefix=None, anchor=DeterministicAnchor(0.0)):
    return Scenario(
        name=name,
        sequence=MeasureSequence(tail, prefix=prefix),
        defaults=ScenarioDefaults(anchor=anchor),
        description=description,
    )


def builtin_scenarios() -> dict[str, Scenario]:
    half_atoms = Atoms([(0, "1/2"), ("1/2", "1/2")])
    ramp = PiecewiseDensity([0.0, 0.5, 1.0], [2.0, 0.0])
    return {
        s.name: s
        for s in [
            _builtin(
                "c1_wrapped_gaussian",
                IidTail(WrappedGaussian(0.0, 0.5)),
                "iid wrapped Gaussian, variance series diverges: unique law",
            ),
            _builtin(
                "c2_dirac_third",
                IidTail(Dirac("1/3")),
                "iid point mass at 1/3: deterministic strong solutions",
            ),
            _builtin(
                "c3_half_atoms",
                IidTail(half_atoms),
                "iid atoms on {0, 1/2}: generator 2, neither regime",
                anchor=UniformAnchor(),
            ),
            _builtin(
                "c2_geometric_gaussian",
                WrappedGaussianTail(ZeroMean(), GeometricVariance(0.25, 0.5)),
                "wrapped Gaussian tail with summable variances: strong solutions",
            ),
            _builtin(
                "c2_geometric_prefixed",
                WrappedGaussianTail(ZeroMean(), GeometricVariance(0.25, 0.5)),
                "summable Gaussian tail behind a two-measure prefix",
                prefix={0: Dirac("1/10"), -1: WrappedGaussian(0.2, 0.01)},
            ),
            _builtin(
                "c1_roulette",
                ScaledDensityTail(ramp),
                "law of frac(j * gamma) for a density gamma: equidistribution by scaling",
            ),
            _builtin(
                "c1_sqrt2_atoms",
                IidTail(Atoms([(0, 0.5), (math.sqrt(2.0) - 1.0, 0.5)])),
                "iid atoms with an irrational gap: non-arithmetic, unique law",
            ),
            _builtin(
                "c3_eighth_atoms",
                IidTail(Atoms([(0, "1/2"), ("1/8", "1/4"), ("3/8", "1/4")])),
                "iid atoms on the (1/8)Z grid: generator 8, exact cyclic oracle",
            ),
            _builtin(
                "c1_uniform_iid",
                IidTail(Uniform()),
                "iid Haar noise: one step makes the state uniform",
            ),
        ]
    }


def get_builtin(name: str) -> Scenario:
    scenarios = builtin_scenarios()
    if name not in scenarios:
        known = ", ".join(sorted(scenarios))
        raise ScenarioParseError(f"unknown builtin scenario {name!r}; known: {known}")
    return scenarios[name]


def with_overrides(scenario: Scenario, **kwargs) -> Scenario:
    """Scenario with defaults overridden by the given non-None values."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    if not updates:
        return scenario
    return replace(scenario, defaults=replace(scenario.defaults, **updates))
