"""Experiment configuration: JSON files, validation and default resolution.

A config is a JSON object.  ``load_config`` validates it and fills every
default, and the resolved form (``ExperimentConfig.to_dict``) is what
reports echo, so a report can be re-run from its own ``config`` field.
"""

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import ConfigurationError
from ..frame import OptimizerConfig
from ..seqgen import DEFAULT_CENTERS, DEFAULT_LADDER
from ..spaces import HARDY_DISC, Space

COMMANDS = ("gram", "frame", "dual", "carleson", "lift", "babenko", "seqgen")
FORMATS = ("json", "csv")
SOURCES = ("points", "seip_lattice", "radial_geometric", "random_separated")
EMBEDDINGS = (None, "diagonal", "pad")
TARGETS = ("bergman_disc", "hardy_ball", "hardy_bidisc")

TOP_LEVEL = ("command", "space", "exponents", "sequence", "truncations", "optimizer", "quadrature",
             "carleson", "dual", "lift", "density", "babenko", "seed", "output")

SEQUENCE_FIELDS = {
    "points": {"points": None},
    "seip_lattice": {"sigma": 2.0, "angular_density": 1.0, "rings": 4, "seed": None},
    "radial_geometric": {"count": 10, "base": 0.5},
    "random_separated": {"count": 6, "min_sep": 0.2, "max_radius": 0.8},
}

QUADRATURE_DEFAULTS = {"resolution": None, "radial": None, "graded": False, "angular": 16, "panel": 3,
                       "transverse": 1, "torus_angular": 8}
CARLESON_DEFAULTS = {"depth": 8}
DUAL_DEFAULTS = {"trials": 64, "probes": 4}
LIFT_DEFAULTS = {"q_values": [2.0], "resolution": 16, "radial": None}
DENSITY_DEFAULTS = {"r_ladder": list(DEFAULT_LADDER), "centers": DEFAULT_CENTERS}
BABENKO_DEFAULTS = {
    "p": 3.0,
    "q": 6.0,
    "target": "bergman_disc",
    "sigma": 6.0,
    "rings": 4,
    "lattice_seed": None,
    "density_bracket": [0.01, 0.3],
    "margin": 0.05,
    "max_bisections": 30,
}
BABENKO_OPTIMIZER = {"restarts": 1, "max_iters": 600, "tol": 1e-7}
OUTPUT_DEFAULTS = {"dir": "results", "format": "json"}


def _merge(name: str, given, defaults: dict) -> dict:
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigurationError(f"'{name}' must be an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigurationError(f"unknown fields in '{name}': {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(given))
    return out


def _positive_int(name, v, minimum=1):
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigurationError(f"'{name}' must be an integer >= {minimum}, got {v!r}")
    return v


def _real(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigurationError(f"'{name}' must be a number, got {v!r}")
    return float(v)


def _parse_points(raw, n: int) -> list:
    """Points as lists of n coordinates, each [re, im] or a real number."""
    if not isinstance(raw, list):
        raise ConfigurationError("'sequence.points' must be a list of points")
    pts = []
    for i, pt in enumerate(raw):
        if not isinstance(pt, list) or len(pt) != n:
            raise ConfigurationError(f"point {i} must list {n} coordinate(s)")
        coords = []
        for c in pt:
            if isinstance(c, list) and len(c) == 2:
                coords.append([_real("coordinate", c[0]), _real("coordinate", c[1])])
            else:
                coords.append([_real("coordinate", c), 0.0])
        pts.append(coords)
    return pts


@dataclass
class ExperimentConfig:
    command: str
    space: Optional[Space]
    exponents: list
    sequence: dict
    truncations: Optional[list]
    optimizer: OptimizerConfig
    quadrature: dict
    carleson: dict
    dual: dict
    lift: dict
    density: dict
    babenko: Optional[dict]
    seed: int
    output: dict = field(default_factory=lambda: dict(OUTPUT_DEFAULTS))

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "space": None if self.space is None else self.space.to_dict(),
            "exponents": list(self.exponents),
            "sequence": copy.deepcopy(self.sequence),
            "truncations": None if self.truncations is None else list(self.truncations),
            "optimizer": self.optimizer.to_dict(),
            "quadrature": dict(self.quadrature),
            "carleson": dict(self.carleson),
            "dual": dict(self.dual),
            "lift": copy.deepcopy(self.lift),
            "density": copy.deepcopy(self.density),
            "babenko": copy.deepcopy(self.babenko),
            "seed": self.seed,
            "output": dict(self.output),
        }


def _resolve_sequence(raw, command, space) -> dict:
    if command == "babenko":
        if raw is not None:
            raise ConfigurationError("babenko builds its own lattice; omit 'sequence' and use 'babenko'")
        return None
    if not isinstance(raw, dict) or "source" not in raw:
        raise ConfigurationError("'sequence' must be an object with a 'source' field")
    source = raw["source"]
    if source not in SOURCES:
        raise ConfigurationError(f"unknown sequence source {source!r}; expected one of {SOURCES}")
    body = {k: v for k, v in raw.items() if k not in ("source", "embed")}
    seq = _merge("sequence", body, SEQUENCE_FIELDS[source])
    embed = raw.get("embed")
    if embed not in EMBEDDINGS:
        raise ConfigurationError(f"unknown embedding {embed!r}; expected one of {EMBEDDINGS}")
    if source == "points":
        if seq["points"] is None:
            raise ConfigurationError("'sequence.points' is required for source 'points'")
        if embed is not None:
            raise ConfigurationError("inline points are given in the target space; remove 'embed'")
        seq["points"] = _parse_points(seq["points"], space.n)
    elif source == "seip_lattice":
        _real("sequence.sigma", seq["sigma"])
        _real("sequence.angular_density", seq["angular_density"])
        _positive_int("sequence.rings", seq["rings"])
    elif source == "radial_geometric":
        _positive_int("sequence.count", seq["count"])
        _real("sequence.base", seq["base"])
    else:
        _positive_int("sequence.count", seq["count"])
        _real("sequence.min_sep", seq["min_sep"])
        _real("sequence.max_radius", seq["max_radius"])
    if source in ("seip_lattice", "radial_geometric"):
        if embed is None and space.n != 1:
            raise ConfigurationError(f"disc generators need 'embed' ('diagonal' or 'pad') for {space}")
        if embed == "diagonal" and not (space.is_polydisc and space.n == 2):
            raise ConfigurationError("'diagonal' embedding targets HardyPolydisc(2)")
        if embed == "pad" and not (space.is_ball and space.n >= 2):
            raise ConfigurationError("'pad' embedding targets a ball of dimension >= 2")
    elif source == "random_separated" and embed is not None:
        raise ConfigurationError("random_separated samples the target space directly; remove 'embed'")
    return {"source": source, "embed": embed, **seq}


def _resolve_babenko(raw) -> dict:
    b = _merge("babenko", raw, BABENKO_DEFAULTS)
    p, q = _real("babenko.p", b["p"]), _real("babenko.q", b["q"])
    if not (2 < p < q):
        raise ConfigurationError(f"babenko needs 2 < p < q, got p={p}, q={q}")
    if b["target"] not in TARGETS:
        raise ConfigurationError(f"unknown babenko target {b['target']!r}; expected one of {TARGETS}")
    _real("babenko.sigma", b["sigma"])
    _positive_int("babenko.rings", b["rings"])
    _positive_int("babenko.max_bisections", b["max_bisections"])
    br = b["density_bracket"]
    if not (isinstance(br, list) and len(br) == 2 and 0 < _real("bracket", br[0]) < _real("bracket", br[1])):
        raise ConfigurationError("'babenko.density_bracket' must be [low, high] with 0 < low < high")
    if not 0 <= _real("babenko.margin", b["margin"]) < 0.5:
        raise ConfigurationError("'babenko.margin' must lie in [0, 1/2)")
    b["p"], b["q"] = p, q
    return b


def resolve(raw: dict) -> ExperimentConfig:
    """Validate a parsed config object and fill in every default."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    unknown = set(raw) - set(TOP_LEVEL)
    if unknown:
        raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigurationError(f"'command' must be one of {COMMANDS}, got {command!r}")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigurationError(f"'seed' must be an unsigned 64-bit integer, got {seed!r}")

    babenko = _resolve_babenko(raw.get("babenko")) if command == "babenko" else None
    if command != "babenko" and raw.get("babenko") is not None:
        raise ConfigurationError("'babenko' is only valid for the babenko command")

    if command == "babenko":
        if raw.get("space") is not None:
            raise ConfigurationError("babenko derives the space from 'babenko.target'; omit 'space'")
        space = None
    else:
        sd = raw.get("space", {"kind": HARDY_DISC})
        if not isinstance(sd, dict) or "kind" not in sd or set(sd) - {"kind", "n", "k"}:
            raise ConfigurationError("'space' must be an object with 'kind' and optional 'n', 'k'")
        space = Space.from_dict(sd)

    exponents = raw.get("exponents", [2.0])
    if not isinstance(exponents, list) or not exponents:
        raise ConfigurationError("'exponents' must be a non-empty list")
    exponents = [_real("exponents", e) for e in exponents]
    for e in exponents:
        if not e > 1:
            raise ConfigurationError(f"exponents must exceed 1, got {e}")
    if command == "babenko":
        exponents = [babenko["q"], babenko["p"]]

    truncations = raw.get("truncations")
    if truncations is not None:
        if not isinstance(truncations, list) or not truncations:
            raise ConfigurationError("'truncations' must be a non-empty list of sizes")
        for t in truncations:
            _positive_int("truncations", t)
        if any(b <= a for a, b in zip(truncations, truncations[1:])):
            raise ConfigurationError("'truncations' must be strictly increasing")
    elif command == "babenko":
        raise ConfigurationError("babenko needs a 'truncations' ladder")

    opt_defaults = OptimizerConfig().to_dict()
    if command == "babenko":
        opt_defaults.update(BABENKO_OPTIMIZER)
    optimizer = OptimizerConfig.from_dict(_merge("optimizer", raw.get("optimizer"), opt_defaults))

    quadrature = _merge("quadrature", raw.get("quadrature"), QUADRATURE_DEFAULTS)
    for key in ("angular", "panel", "transverse", "torus_angular"):
        _positive_int(f"quadrature.{key}", quadrature[key])
    for key in ("resolution", "radial"):
        if quadrature[key] is not None:
            _positive_int(f"quadrature.{key}", quadrature[key], 4)
    if not isinstance(quadrature["graded"], bool):
        raise ConfigurationError("'quadrature.graded' must be true or false")

    carleson = _merge("carleson", raw.get("carleson"), CARLESON_DEFAULTS)
    _positive_int("carleson.depth", carleson["depth"])
    dual = _merge("dual", raw.get("dual"), DUAL_DEFAULTS)
    _positive_int("dual.trials", dual["trials"])
    _positive_int("dual.probes", dual["probes"])
    lift = _merge("lift", raw.get("lift"), LIFT_DEFAULTS)
    if not isinstance(lift["q_values"], list) or not lift["q_values"]:
        raise ConfigurationError("'lift.q_values' must be a non-empty list")
    lift["q_values"] = [_real("lift.q_values", v) for v in lift["q_values"]]
    _positive_int("lift.resolution", lift["resolution"], 4)
    density = _merge("density", raw.get("density"), DENSITY_DEFAULTS)
    density["r_ladder"] = [_real("density.r_ladder", r) for r in density["r_ladder"]]
    _positive_int("density.centers", density["centers"])

    output = _merge("output", raw.get("output"), OUTPUT_DEFAULTS)
    if output["format"] not in FORMATS:
        raise ConfigurationError(f"'output.format' must be one of {FORMATS}")
    if not isinstance(output["dir"], str) or not output["dir"]:
        raise ConfigurationError("'output.dir' must be a non-empty path")

    if command == "lift" and space.kind != "BergmanBall":
        raise ConfigurationError(f"lift starts from a BergmanBall space, not {space}")
    sequence = _resolve_sequence(raw.get("sequence"), command, space)
    return ExperimentConfig(command, space, exponents, sequence, truncations, optimizer, quadrature,
                            carleson, dual, lift, density, babenko, seed, output)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return resolve(raw)
