"""JSON (de)serialization.

Rationals travel as strings "p/q" (or "p"), never as JSON floats.  Floats only
appear for numerical bounds, which Python's ``repr`` round-trips exactly.

Config file schema::

    {
      "ambient": N,
      "points": [{"vector": ["1", "-1/2", "0"], "multiplicity": "3/2"}, ...],
      "options": {"mc_samples": 1000000, "seed": 0, "tol": 1e-8,
                  "search_depth": 3, "section": "auto"}        # optional
    }
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .configuration import Configuration
from .decompose import BasisDecomposition
from .nonarch import ARCHIMEDEAN, Certificate, LocalHeightInterval
from .stability import StabilityVerdict, SubspaceWitness

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")

CONFIG_KEYS = {"ambient", "points", "options"}
POINT_KEYS = {"vector", "multiplicity"}
OPTION_KEYS = {"mc_samples", "seed", "tol", "search_depth", "section", "max_iter"}


class ConfigError(ValueError):
    """Malformed input; ``field`` names the offending location."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def rational_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(where, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ConfigError(where, f"expected a rational string like \"p/q\", got {type(value).__name__}")
    m = _RATIONAL.match(value)
    if not m:
        raise ConfigError(where, f"malformed rational {value!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ConfigError(where, f"zero denominator in {value!r}")
    return Fraction(int(m.group(1)), den)


# -- configurations ------------------------------------------------------------------


def config_to_dict(config: Configuration) -> dict:
    return {
        "ambient": config.ambient,
        "points": [{"vector": [rational_str(x) for x in v], "multiplicity": rational_str(m)} for v, m in config.points()],
    }


def _check_keys(obj: Any, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}.{extra[0]}" if where else extra[0], "unknown field")


def config_from_dict(obj: Any) -> Configuration:
    _check_keys(obj, CONFIG_KEYS, "")
    if "ambient" not in obj:
        raise ConfigError("ambient", "missing")
    n = obj["ambient"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("ambient", "must be a positive integer")
    pts = obj.get("points")
    if not isinstance(pts, list) or not pts:
        raise ConfigError("points", "must be a nonempty list")
    parsed = []
    for i, pt in enumerate(pts):
        where = f"points[{i}]"
        _check_keys(pt, POINT_KEYS, where)
        if "vector" not in pt:
            raise ConfigError(f"{where}.vector", "missing")
        vec = pt["vector"]
        if not isinstance(vec, list) or len(vec) != n + 1:
            raise ConfigError(f"{where}.vector", f"must be a list of {n + 1} rationals")
        v = tuple(parse_rational(x, f"{where}.vector[{j}]") for j, x in enumerate(vec))
        if not any(v):
            raise ConfigError(f"{where}.vector", "zero vector")
        m = parse_rational(pt.get("multiplicity", "1"), f"{where}.multiplicity")
        if m <= 0:
            raise ConfigError(f"{where}.multiplicity", "must be positive")
        parsed.append((v, m))
    try:
        return Configuration.from_points(n, parsed)
    except ValueError as exc:
        raise ConfigError("points", str(exc)) from exc


def options_from_dict(obj: Any):
    from .heights import HeightOptions

    if obj is None:
        return HeightOptions()
    _check_keys(obj, OPTION_KEYS, "options")
    kwargs = {}
    for key, kind in (("mc_samples", int), ("seed", int), ("search_depth", int), ("max_iter", int)):
        if key in obj:
            if isinstance(obj[key], bool) or not isinstance(obj[key], int) or obj[key] < 0:
                raise ConfigError(f"options.{key}", "must be a nonnegative integer")
            kwargs[key] = obj[key]
    if "tol" in obj:
        if isinstance(obj["tol"], bool) or not isinstance(obj["tol"], (int, float)) or obj["tol"] <= 0:
            raise ConfigError("options.tol", "must be a positive number")
        kwargs["tol"] = float(obj["tol"])
    if "section" in obj:
        if obj["section"] not in ("auto", "decomposition"):
            raise ConfigError("options.section", "must be \"auto\" or \"decomposition\"")
        kwargs["section"] = obj["section"]
    return HeightOptions(**kwargs)


@dataclass(frozen=True)
class ConfigFile:
    config: Configuration
    options: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, obj: Any) -> ConfigFile:
        config = config_from_dict(obj)
        opts = obj.get("options")
        options_from_dict(opts)  # validate
        return cls(config, dict(opts or {}))

    @classmethod
    def load(cls, path: str | Path) -> ConfigFile:
        text = Path(path).read_text(encoding="utf-8")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<json>", f"invalid JSON at line {exc.lineno} column {exc.colno}") from exc
        return cls.parse(obj)

    def to_dict(self) -> dict:
        out = config_to_dict(self.config)
        if self.options:
            out["options"] = dict(self.options)
        return out


# -- results ------------------------------------------------------------------------


def witness_to_dict(w: SubspaceWitness | None) -> dict | None:
    if w is None:
        return None
    return {
        "basis": [[rational_str(x) for x in v] for v in w.basis],
        "dim": w.dim,
        "mass": rational_str(w.mass),
        "members": list(w.members),
    }


def witness_from_dict(obj: dict | None) -> SubspaceWitness | None:
    if obj is None:
        return None
    basis = tuple(tuple(parse_rational(x, "witness.basis") for x in v) for v in obj["basis"])
    return SubspaceWitness(basis, obj["dim"], parse_rational(obj["mass"], "witness.mass"), tuple(obj["members"]))


def verdict_to_dict(v: StabilityVerdict) -> dict:
    return {"status": v.status.value, "witness": witness_to_dict(v.witness)}


def verdict_from_dict(obj: dict) -> StabilityVerdict:
    from .stability import Status

    return StabilityVerdict(Status(obj["status"]), witness_from_dict(obj["witness"]))


def decomposition_to_dict(dec: BasisDecomposition) -> dict:
    return {
        "dictionary": [[rational_str(x) for x in v] for v in dec.dictionary],
        "terms": [{"coefficient": rational_str(c), "basis": list(b)} for c, b in dec.terms],
    }


def decomposition_from_dict(obj: dict) -> BasisDecomposition:
    dictionary = tuple(tuple(parse_rational(x, "dictionary") for x in v) for v in obj["dictionary"])
    terms = tuple((parse_rational(t["coefficient"], "terms.coefficient"), tuple(t["basis"])) for t in obj["terms"])
    return BasisDecomposition(dictionary, terms)


def interval_to_dict(iv: LocalHeightInterval) -> dict:
    return {
        "place": iv.place,
        "lower": iv.lower,
        "upper": iv.upper,
        "certificate": iv.certificate.value,
        "depth": iv.depth,
        "note": iv.note,
    }


def interval_from_dict(obj: dict) -> LocalHeightInterval:
    place = obj["place"] if obj["place"] == ARCHIMEDEAN else int(obj["place"])
    return LocalHeightInterval(place, obj["lower"], obj["upper"], Certificate(obj["certificate"]), obj["depth"], obj["note"])


def estimate_to_dict(est) -> dict:
    return {
        "total": [est.lower, est.upper],
        "per_place": [interval_to_dict(p) for p in est.per_place],
        "config_digest": est.config_digest,
        "options": dict(est.options),
        "status": est.status,
        "margin": est.margin,
    }


def estimate_from_dict(obj: dict):
    from .heights import HeightEstimate

    lower, upper = obj["total"]
    return HeightEstimate(
        lower,
        upper,
        tuple(interval_from_dict(p) for p in obj["per_place"]),
        obj["config_digest"],
        dict(obj["options"]),
        obj.get("status", ""),
        obj.get("margin"),
    )


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Canonical JSON: sorted keys, no NaN."""
    return json.dumps(obj, sort_keys=True, indent=indent, allow_nan=False)


def options_to_dict(options) -> dict:
    return asdict(options)
