"""Loading and validating ``mllint.toml``."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

import tomli

from .model import SLUG_PATTERN

CONFIG_FILENAME = "mllint.toml"
PROFILES = ("poc", "production")
DEFAULT_PROFILE = "production"

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3


class ConfigError(Exception):
    """The configuration file is malformed or refers to unknown rules."""


@dataclass(frozen=True)
class Thresholds:
    large_file_bytes: int = 10 * 1024 * 1024
    test_ratio_target: float = 0.25
    coverage_target: float = 0.8


@dataclass(frozen=True)
class RuleOverride:
    weight: Optional[float] = None
    disabled: bool = False


@dataclass(frozen=True)
class CustomRuleSpec:
    slug: str
    name: str
    run: str
    weight: float = 1.0


@dataclass(frozen=True)
class Config:
    profile: str = DEFAULT_PROFILE
    rule_overrides: dict[str, RuleOverride] = field(default_factory=dict)
    thresholds: Thresholds = field(default_factory=Thresholds)
    test_report_path: Optional[str] = None
    coverage_report_path: Optional[str] = None
    custom_rules: tuple[CustomRuleSpec, ...] = ()

    def with_profile(self, profile: str) -> Config:
        if profile not in PROFILES:
            raise ConfigError(f"profile: unknown profile {profile!r}, expected one of {', '.join(PROFILES)}")
        return dataclasses.replace(self, profile=profile)

    def canonical_json(self) -> str:
        data = dataclasses.asdict(self)
        data["rule_overrides"] = {k: data["rule_overrides"][k] for k in sorted(data["rule_overrides"])}
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return f"{fnv1a_64(self.canonical_json().encode('utf-8')):016x}"


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def load_config(root: str | Path, known_slugs: Optional[Iterable[str]] = None) -> Config:
    """Read ``mllint.toml`` from ``root``, or return the defaults when it is absent.

    ``known_slugs`` defaults to the built-in rule registry.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    path = root / CONFIG_FILENAME
    if not path.is_file():
        return Config()
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{CONFIG_FILENAME}: cannot read file: {exc}") from exc
    return parse_config(text, known_slugs=known_slugs)


def parse_config(text: str, known_slugs: Optional[Iterable[str]] = None) -> Config:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        lineno = getattr(exc, "lineno", None)
        where = f" (line {lineno})" if lineno and "at line" not in str(exc) else ""
        raise ConfigError(f"{CONFIG_FILENAME}: {exc}{where}") from exc

    if known_slugs is None:
        from .engine import register_rules

        known_slugs = [rule.slug for rule in register_rules()]
    config = _build(data)
    validate_config(config, known_slugs)
    return config


_TOP_KEYS = {"profile", "rules", "thresholds", "testing", "custom-rules"}


def _fail(where: str, message: str) -> ConfigError:
    return ConfigError(f"{CONFIG_FILENAME}: {where}: {message}")


def _expect(value: Any, types: type | tuple[type, ...], where: str, what: str) -> Any:
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise _fail(where, f"expected {what}, got {value!r}")
    if not isinstance(value, types):
        raise _fail(where, f"expected {what}, got {value!r}")
    return value


def _check_keys(table: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise _fail(where, f"unknown key(s): {', '.join(unknown)}")


def _build(data: dict[str, Any]) -> Config:
    _check_keys(data, _TOP_KEYS, "top level")

    profile = _expect(data.get("profile", DEFAULT_PROFILE), str, "profile", "a string")
    if profile not in PROFILES:
        raise _fail("profile", f"unknown profile {profile!r}, expected one of {', '.join(PROFILES)}")

    overrides: dict[str, RuleOverride] = {}
    rules = _expect(data.get("rules", {}), dict, "rules", "a table")
    _check_keys(rules, {"disabled", "weights"}, "rules")
    for i, slug in enumerate(_expect(rules.get("disabled", []), list, "rules.disabled", "an array")):
        _expect(slug, str, f"rules.disabled[{i}]", "a rule slug")
        overrides[slug] = RuleOverride(disabled=True)
    for slug, weight in _expect(rules.get("weights", {}), dict, "rules.weights", "a table").items():
        where = f'rules.weights."{slug}"'
        _expect(weight, (int, float), where, "a number")
        if not math.isfinite(weight) or weight < 0:
            raise _fail(where, "weight must be a finite number >= 0")
        previous = overrides.get(slug, RuleOverride())
        overrides[slug] = RuleOverride(weight=float(weight), disabled=previous.disabled)

    thresholds_table = _expect(data.get("thresholds", {}), dict, "thresholds", "a table")
    _check_keys(thresholds_table, {"large-file-bytes", "test-ratio-target", "coverage-target"}, "thresholds")
    defaults = Thresholds()
    large = _expect(thresholds_table.get("large-file-bytes", defaults.large_file_bytes), int,
                    "thresholds.large-file-bytes", "an integer")
    ratio = _expect(thresholds_table.get("test-ratio-target", defaults.test_ratio_target), (int, float),
                    "thresholds.test-ratio-target", "a number")
    coverage = _expect(thresholds_table.get("coverage-target", defaults.coverage_target), (int, float),
                       "thresholds.coverage-target", "a number")
    thresholds = Thresholds(large, float(ratio), float(coverage))

    testing = _expect(data.get("testing", {}), dict, "testing", "a table")
    _check_keys(testing, {"report", "coverage-report"}, "testing")
    report = testing.get("report")
    if report is not None:
        _expect(report, str, "testing.report", "a path string")
    coverage_report = testing.get("coverage-report")
    if coverage_report is not None:
        _expect(coverage_report, str, "testing.coverage-report", "a path string")

    custom = []
    for i, entry in enumerate(_expect(data.get("custom-rules", []), list, "custom-rules", "an array of tables")):
        where = f"custom-rules[{i}]"
        _expect(entry, dict, where, "a table")
        _check_keys(entry, {"slug", "name", "run", "weight"}, where)
        for key in ("slug", "name", "run"):
            if key not in entry:
                raise _fail(where, f"missing required key {key!r}")
            _expect(entry[key], str, f"{where}.{key}", "a string")
        weight = _expect(entry.get("weight", 1.0), (int, float), f"{where}.weight", "a number")
        custom.append(CustomRuleSpec(entry["slug"], entry["name"], entry["run"], float(weight)))

    return Config(
        profile=profile,
        rule_overrides=overrides,
        thresholds=thresholds,
        test_report_path=report,
        coverage_report_path=coverage_report,
        custom_rules=tuple(custom),
    )


def validate_config(config: Config, known_slugs: Iterable[str]) -> None:
    """Check cross-field constraints. Custom rule slugs count as known."""
    builtin = set(known_slugs)
    t = config.thresholds
    if t.large_file_bytes <= 0:
        raise _fail("thresholds.large-file-bytes", "must be > 0")
    if not (math.isfinite(t.test_ratio_target) and t.test_ratio_target > 0):
        raise _fail("thresholds.test-ratio-target", "must be > 0")
    if not (0 < t.coverage_target <= 1):
        raise _fail("thresholds.coverage-target", "must be in (0, 1]")

    custom_slugs: set[str] = set()
    for i, spec in enumerate(config.custom_rules):
        where = f"custom-rules[{i}]"
        if not SLUG_PATTERN.match(spec.slug):
            raise _fail(f"{where}.slug", f"invalid slug {spec.slug!r}")
        if spec.slug in builtin:
            raise _fail(f"{where}.slug", f"{spec.slug!r} collides with a built-in rule")
        if spec.slug in custom_slugs:
            raise _fail(f"{where}.slug", f"duplicate custom rule slug {spec.slug!r}")
        if not spec.run.strip():
            raise _fail(f"{where}.run", "must not be empty")
        if not spec.name.strip():
            raise _fail(f"{where}.name", "must not be empty")
        if not math.isfinite(spec.weight) or spec.weight < 0:
            raise _fail(f"{where}.weight", "must be a finite number >= 0")
        custom_slugs.add(spec.slug)

    for slug in sorted(config.rule_overrides):
        if slug not in builtin and slug not in custom_slugs:
            raise _fail("rules", f"unknown rule slug {slug!r}")
