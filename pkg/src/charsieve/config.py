"""Typed run configuration for the command-line pipelines.

A configuration is a flat set of ``key = value`` assignments.  Files use
one assignment per line with ``#`` comments; the command line may override
any file value through the global flags.  Every key is range-checked at
construction, so a :class:`RunConfig` instance is always internally valid,
and the set of keys that were explicitly assigned (rather than defaulted)
travels with the instance so reports can echo overrides verbatim.

Conventions
-----------
* Unknown keys are rejected with the line number where they appear; silent
  extension keys would make runs irreproducible.
* ``mode`` selects how strictly the mean-value harnesses enforce their
  stated hypotheses: ``paper`` requires explicit support floors, ``desk``
  relaxes them for exploratory ranges.  The command line defaults to desk;
  library entry points default to paper.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from os import PathLike
from typing import Any, Mapping

from charsieve.errors import ConfigError

_MODES = ("paper", "desk")


@dataclass(frozen=True)
class RunConfig:
    """All tunable run parameters, validated on construction.

    ``overridden`` records which keys were set explicitly (file or flag);
    it is not itself a configurable key.
    """

    tol: float = 1.0e-8
    zero_tol: float = 1.0e-10
    c: float = 0.1
    c3: float = 1.0
    c4: float = 1.0
    delta: float = 0.1
    z: float = 4.0
    eps: float = 0.1
    eps0: float = 0.25
    eps2: float = 0.01
    eps3: float = 0.01
    eps4: float = 0.01
    mode: str = "desk"
    seed: int = 1
    threads: int = 1
    out_dir: str = "."
    overridden: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.tol > 0.0:
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        if not self.zero_tol > 0.0:
            raise ConfigError(f"zero_tol must be positive, got {self.zero_tol!r}")
        for key in ("c", "c3", "c4", "eps2", "eps3", "eps4"):
            value = getattr(self, key)
            if not value > 0.0:
                raise ConfigError(f"{key} must be positive, got {value!r}")
        if not 0.0 < self.delta < 0.25:
            raise ConfigError(f"delta must lie in (0, 1/4), got {self.delta!r}")
        if not self.z >= 1.0:
            raise ConfigError(f"z must be at least 1, got {self.z!r}")
        if not 0.0 < self.eps < 1.0:
            raise ConfigError(f"eps must lie in (0, 1), got {self.eps!r}")
        if not 0.0 < self.eps0 < 0.5:
            raise ConfigError(f"eps0 must lie in (0, 1/2), got {self.eps0!r}")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads!r}")
        unknown = set(self.overridden) - set(_FIELD_TYPES)
        if unknown:
            raise ConfigError(f"unknown override keys {sorted(unknown)}")

    def replace(self, **changes: Any) -> "RunConfig":
        """A copy with ``changes`` applied and recorded as overrides."""
        merged = dict.fromkeys(self.overridden)
        merged.update(dict.fromkeys(changes))
        return dataclasses.replace(
            self, overridden=tuple(merged), **changes
        )

    def as_mapping(self) -> dict[str, Any]:
        """All key values, for echoing into reports (excludes bookkeeping)."""
        payload = dataclasses.asdict(self)
        del payload["overridden"]
        return payload

    def overrides(self) -> dict[str, Any]:
        """Only the explicitly assigned keys, echoed verbatim."""
        return {key: getattr(self, key) for key in self.overridden}


_FIELD_TYPES: Mapping[str, type] = {
    f.name: f.type if isinstance(f.type, type) else {"float": float, "int": int, "str": str}[f.type]  # type: ignore[index]
    for f in dataclasses.fields(RunConfig)
    if f.name != "overridden"
}


def _convert(key: str, raw: str, lineno: int) -> Any:
    kind = _FIELD_TYPES[key]
    if kind is str:
        return raw
    try:
        if kind is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: value {raw!r} for key {key!r} is not a valid "
            f"{kind.__name__}"
        ) from None


def parse_config(path: str | PathLike[str]) -> RunConfig:
    """Read ``key = value`` assignments into a validated :class:`RunConfig`.

    Blank lines and ``#`` comments (whole-line or trailing) are ignored.
    Unknown keys and malformed lines are rejected with their line number;
    out-of-range values are rejected with their key name.
    """
    assignments: dict[str, Any] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(
                    f"line {lineno}: expected 'key = value', got {line.rstrip()!r}"
                )
            key, _, raw = text.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _FIELD_TYPES:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in assignments:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            if not raw:
                raise ConfigError(f"line {lineno}: empty value for key {key!r}")
            assignments[key] = _convert(key, raw, lineno)
    return RunConfig(overridden=tuple(assignments), **assignments)
