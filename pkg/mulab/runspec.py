"""mulab.runspec

Experiment specs: symbolic edge probabilities, the key=value spec format and
per-experiment defaults.

Spec file schema (one ``key = value`` per line, ``#`` comments)::

    experiment = xi            # registry name (required unless given on the CLI)
    n = 2000                   # vertex count
    p = 0.3                    # "c", "c/n" or "c*ln(n)/n"
    d = 3                      # degree (regular experiments)
    replicas = 5
    seed = 7                   # "value" or "value:stream"
    <option> = <value>         # experiment option, see EXPERIMENT_DEFAULTS
    verdict.<name> = <number>  # verdict threshold

Unknown keys are rejected. Specs never read the environment.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import DomainError, UsageError
from .rng import Seed, as_seed

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?"
_RE_PER_N = re.compile(rf"^({_NUM})\s*/\s*n$")
_RE_LOG_PER_N = re.compile(rf"^({_NUM})\s*\*\s*ln\(n\)\s*/\s*n$")
_RE_CONST = re.compile(rf"^{_NUM}$")


@dataclass(frozen=True)
class PSpec:
    """Edge probability as a function of n: ``const``, ``c/n`` or ``c*ln(n)/n``."""

    kind: str
    c: float

    @classmethod
    def parse(cls, text: str) -> "PSpec":
        s = str(text).strip().replace(" ", "")
        m = _RE_PER_N.match(s)
        if m:
            return cls("per_n", float(m.group(1)))
        m = _RE_LOG_PER_N.match(s)
        if m:
            return cls("log_per_n", float(m.group(1)))
        if _RE_CONST.match(s):
            return cls("const", float(s))
        raise UsageError(f"cannot parse p={text!r}; expected c, c/n or c*ln(n)/n")

    def value(self, n: int) -> float:
        if self.kind == "const":
            p = self.c
        elif self.kind == "per_n":
            p = self.c / n if n > 0 else 0.0
        else:
            p = self.c * math.log(n) / n if n > 1 else 0.0
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"p={self} evaluates to {p} at n={n}, outside [0, 1]")
        return p

    def __str__(self) -> str:
        c = _fmt(self.c)
        if self.kind == "per_n":
            return f"{c}/n"
        if self.kind == "log_per_n":
            return f"{c}*ln(n)/n"
        return c


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


# Per experiment: model parameters, replicas, option defaults (the accepted option keys) and verdict thresholds.
EXPERIMENT_DEFAULTS: Dict[str, Dict[str, object]] = {
    "xi": {
        "n": 2000, "p": "0.3", "replicas": 5,
        "options": {"block_rows": "256"},
        "thresholds": {"median_lo": 0.5, "median_hi": 1.3},
    },
    "second-order": {
        "n": 14, "p": "0.5", "replicas": 1,
        "options": {"n_grid": "10,12,14", "p_grid": "0,0.2,0.5"},
        "thresholds": {"alpha_slack": 0.0},
    },
    "uniqueness": {
        "n": 10000, "p": "1.5*ln(n)/n", "replicas": 50,
        "options": {},
        "thresholds": {"min_fraction": 0.9},
    },
    "threshold": {
        "n": 12, "p": "1/n", "replicas": 3,
        "options": {
            "track": "exact",
            "c_grid": "0.2,0.5,0.8,1,1.2,1.5,2,3,5",
            "eps": "0.2",
            "critical_band": "0.1",
            "path_tries": "20",
        },
        "thresholds": {"upper_exponent": 0.99, "lower_floor": 0.0},
    },
    "tree-components": {
        "n": 10000, "p": "0.5/n", "replicas": 1000,
        "options": {"k_list": "1,2,3", "dup_k": "auto"},
        "thresholds": {"sigma": 4.0, "unique_fraction": 0.99},
    },
    "gw": {
        "n": 0, "p": "0", "replicas": 100000,
        "options": {
            "eps_grid": "0.05,0.1,0.2",
            "max_nodes": "1000000",
            "forest_size": "1000",
            "forest_replicas": "0",
        },
        "thresholds": {"stderr_mult": 5.0, "many_fraction": 0.9},
    },
    "anatomy": {
        "n": 10000, "p": "2/n", "replicas": 20,
        "options": {"verdict_min_lambda": "1.05"},
        "thresholds": {"core_tol": 0.05, "pendant_z": 5.0},
    },
    "regular": {
        "n": 1000, "d": 3, "replicas": 10,
        "options": {"path_tries": "20", "edge_trials": "200", "edge_min_fraction": "0.25"},
        "thresholds": {"comb_floor": 0.02, "comb_fraction": 0.8, "edge_lo": 0.5, "edge_hi": 1.5},
    },
    "bounded-degree": {
        "n": 16, "p": "2/n", "replicas": 5,
        "options": {"max_degree": "3", "structured": "path,comb,matching,empty"},
        "thresholds": {"max_log2_ratio": 0.9},
    },
    "boring": {
        "n": 0, "p": "0", "replicas": 1,
        "options": {"grid_points": "1000000"},
        "thresholds": {"min_margin": 0.0},
    },
}

_CORE_KEYS = ("experiment", "n", "p", "d", "replicas", "seed")


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved experiment parameters; a pure description, hashable and picklable."""

    name: str
    n: int = 0
    p: Optional[PSpec] = None
    d: Optional[int] = None
    replicas: int = 1
    seed: Seed = Seed(0)
    options: Tuple[Tuple[str, str], ...] = ()
    thresholds: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        if self.replicas < 1:
            raise DomainError("replicas must be >= 1")
        if self.n < 0:
            raise DomainError("n must be non-negative")

    # -- option access ---------------------------------------------------

    def option(self, key: str) -> str:
        opts = dict(self.options)
        if key not in opts:
            raise UsageError(f"experiment {self.name!r} has no option {key!r}")
        return opts[key]

    def opt_int(self, key: str) -> int:
        return int(self.option(key))

    def opt_float(self, key: str) -> float:
        return float(self.option(key))

    def opt_floats(self, key: str) -> List[float]:
        return [float(x) for x in self.option(key).split(",") if x.strip()]

    def opt_ints(self, key: str) -> List[int]:
        return [int(x) for x in self.option(key).split(",") if x.strip()]

    def opt_list(self, key: str) -> List[str]:
        return [x.strip() for x in self.option(key).split(",") if x.strip()]

    def threshold(self, key: str) -> float:
        return dict(self.thresholds)[key]

    def p_value(self, n: Optional[int] = None) -> float:
        if self.p is None:
            raise UsageError(f"experiment {self.name!r} needs p")
        return self.p.value(self.n if n is None else n)

    def with_overrides(self, **changes: object) -> "ExperimentSpec":
        return replace(self, **changes)

    # -- serialization ---------------------------------------------------

    def to_text(self) -> str:
        """Canonical key=value text; the spec hash is taken over this."""
        lines = [f"experiment = {self.name}", f"n = {self.n}"]
        if self.p is not None:
            lines.append(f"p = {self.p}")
        if self.d is not None:
            lines.append(f"d = {self.d}")
        lines.append(f"replicas = {self.replicas}")
        lines.append(f"seed = {self.seed}")
        lines.extend(f"{k} = {v}" for k, v in sorted(self.options))
        lines.extend(f"verdict.{k} = {_fmt(v)}" for k, v in sorted(self.thresholds))
        return "\n".join(lines) + "\n"

    def spec_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def parse_kv(text: str) -> Dict[str, str]:
    """``key = value`` lines into a dict; duplicate keys are an error."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"spec line {lineno}: expected key = value, got {raw!r}")
        key = key.strip()
        if key in out:
            raise UsageError(f"spec line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def build_spec(name: Optional[str], values: Mapping[str, str]) -> ExperimentSpec:
    """
    Resolve an ExperimentSpec from raw key=value pairs over the experiment's defaults.

    ``name`` (e.g. from the CLI) wins over an ``experiment`` key in ``values``.
    """
    values = dict(values)
    exp = name or values.get("experiment")
    if not exp:
        raise UsageError("no experiment name given")
    if exp not in EXPERIMENT_DEFAULTS:
        raise UsageError(f"unknown experiment {exp!r}; known: {', '.join(sorted(EXPERIMENT_DEFAULTS))}")
    if name and values.get("experiment") not in (None, name):
        raise UsageError(f"spec names experiment {values['experiment']!r} but {name!r} was requested")
    defaults = EXPERIMENT_DEFAULTS[exp]
    options = dict(defaults["options"])  # type: ignore[arg-type]
    thresholds = dict(defaults["thresholds"])  # type: ignore[arg-type]
    unknown = []
    for key, value in values.items():
        if key in _CORE_KEYS:
            continue
        if key.startswith("verdict."):
            tkey = key[len("verdict.") :]
            if tkey not in thresholds:
                unknown.append(key)
                continue
            thresholds[tkey] = _to_float(key, value)
        elif key in options:
            options[key] = value
        else:
            unknown.append(key)
    if unknown:
        raise UsageError(f"unknown keys for experiment {exp!r}: {', '.join(sorted(unknown))}")

    n = _to_int("n", values.get("n", str(defaults.get("n", 0))))
    p_text = values.get("p", defaults.get("p"))
    d_text = values.get("d", defaults.get("d"))
    return ExperimentSpec(
        name=exp,
        n=n,
        p=PSpec.parse(str(p_text)) if p_text is not None else None,
        d=_to_int("d", str(d_text)) if d_text is not None else None,
        replicas=_to_int("replicas", values.get("replicas", str(defaults.get("replicas", 1)))),
        seed=_to_seed(values.get("seed", "0")),
        options=tuple(sorted(options.items())),
        thresholds=tuple(sorted(thresholds.items())),
    )


def load_spec(text: str, name: Optional[str] = None) -> ExperimentSpec:
    return build_spec(name, parse_kv(text))


def default_spec(name: str, **overrides: str) -> ExperimentSpec:
    return build_spec(name, {k: str(v) for k, v in overrides.items()})


def spec_help(name: Optional[str] = None) -> str:
    """Schema summary: the core keys, then each experiment's options and thresholds with defaults."""
    lines = ["spec keys: experiment, n, p (c | c/n | c*ln(n)/n), d, replicas, seed (value[:stream])"]
    names = [name] if name in EXPERIMENT_DEFAULTS else sorted(EXPERIMENT_DEFAULTS)
    for exp in names:
        defaults = EXPERIMENT_DEFAULTS[exp]
        opts = ", ".join(f"{k}={v}" for k, v in sorted(defaults["options"].items()))  # type: ignore[union-attr]
        thr = ", ".join(f"verdict.{k}={_fmt(v)}" for k, v in sorted(defaults["thresholds"].items()))  # type: ignore[union-attr]
        lines.append(f"  {exp}: n={defaults.get('n')} p={defaults.get('p', '-')} replicas={defaults.get('replicas')}")
        if opts:
            lines.append(f"    options: {opts}")
        lines.append(f"    thresholds: {thr}")
    return "\n".join(lines) + "\n"


def _to_int(key: str, value: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key} must be an integer, got {value!r}") from None


def _to_float(key: str, value: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key} must be a number, got {value!r}") from None


def _to_seed(value: str) -> Seed:
    try:
        return as_seed(value)
    except ValueError:
        raise UsageError(f"seed must be 'value' or 'value:stream', got {value!r}") from None


__all__ = [
    "PSpec",
    "ExperimentSpec",
    "EXPERIMENT_DEFAULTS",
    "parse_kv",
    "build_spec",
    "load_spec",
    "default_spec",
    "spec_help",
]
