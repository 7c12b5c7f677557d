"""Run configuration, result records and CSV/JSON persistence.

Configs are flat INI-style text with a schema version; unknown sections or
keys are rejected so that typos fail loudly.  Records keep every numeric
payload deterministic for a fixed config and seed; wall-clock fields
(``timestamp``, ``seconds``) are the only volatile entries.
"""

from __future__ import annotations

import configparser
import csv
import datetime
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .constants import ConstantLedger
from .errors import ConfigError

__all__ = ["RunConfig", "ReportRecord", "write_csv", "CSV_COLUMNS"]

SCHEMA_VERSION = "1"

CSV_COLUMNS = ["n", "r_min", "r_max", "estimate", "target", "gap", "residual", "seconds"]

_SCHEMA = {
    "run": {"schema_version": str, "seed": int},
    "weight": {"dim": int, "delta": float, "delta_prime": float},
    "grid": {"r_min": float, "r_max": float, "n": int},
    "schedule": {"widen_decades": "floats", "include_coarse": bool},
    "solver": {"residual_tol": float, "max_iterations": int},
    "identities": {
        "samples": int,
        "nodes": int,
        "r_min": float,
        "r_max": float,
        "dims": "ints",
        "deltas": "floats",
    },
    "agmon": {
        "plateau": float,
        "depth": int,
        "step_decades": float,
        "nodes": int,
        "trial_epsilon": float,
    },
    "grushin": {
        "dim2": int,
        "b": float,
        "lambdas": "floats",
        "second_nodes": int,
        "cross_n": int,
    },
    "sweep": {"dims": "ints", "deltas": "floats", "delta_primes": "floats"},
}

_DEFAULTS = {
    "run": {"schema_version": SCHEMA_VERSION, "seed": 0},
    "weight": {"dim": 3, "delta": 0.0, "delta_prime": 0.0},
    "grid": {"r_min": 1e-4, "r_max": 1e4, "n": 4096},
    "schedule": {"widen_decades": None, "include_coarse": True},
    "solver": {"residual_tol": 1e-10, "max_iterations": 500},
    "identities": {
        "samples": 1000,
        "nodes": 17,
        "r_min": 1e-2,
        "r_max": 1e2,
        "dims": [1, 3, 5],
        "deltas": [0.0, 1.0, 2.0, 4.0],
    },
    "agmon": {
        "plateau": 1.0,
        "depth": 7,
        "step_decades": 1.0,
        "nodes": 2049,
        "trial_epsilon": 0.1,
    },
    "grushin": {
        "dim2": 1,
        "b": 1.0,
        "lambdas": [1.0, 1e-1, 1e-2, 1e-3, 1e-4],
        "second_nodes": 257,
        "cross_n": 64,
    },
    "sweep": {
        "dims": [3, 4, 5],
        "deltas": [0.0, 0.5, 1.0, 2.0, 3.0, 4.0],
        "delta_primes": [0.0, 0.5, 1.0, 2.0, 3.0, 4.0],
    },
}


def _parse_value(raw: str, kind):
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            if raw.lower() in ("true", "yes", "1", "on"):
                return True
            if raw.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind == "ints":
            return [int(tok) for tok in raw.split(",") if tok.strip()]
        if kind == "floats":
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse value {raw!r} as {kind}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Validated effective configuration (defaults merged with file values)."""

    sections: dict
    seed: int

    @classmethod
    def default(cls) -> "RunConfig":
        sections = {name: dict(values) for name, values in _DEFAULTS.items()}
        return cls(sections=sections, seed=sections["run"]["seed"])

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as handle:
                parser.read_file(handle)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        sections = {name: dict(values) for name, values in _DEFAULTS.items()}
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                sections[section][key] = _parse_value(raw, _SCHEMA[section][key])
        version = str(sections["run"]["schema_version"])
        if version != SCHEMA_VERSION:
            raise ConfigError(
                f"unrecognized schema_version {version!r} (expected {SCHEMA_VERSION})"
            )
        return cls(sections=sections, seed=sections["run"]["seed"])

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        if seed is None:
            return self
        sections = {name: dict(values) for name, values in self.sections.items()}
        sections["run"]["seed"] = seed
        return RunConfig(sections=sections, seed=seed)

    def __getitem__(self, section: str) -> dict:
        return self.sections[section]

    def canonical_text(self) -> str:
        """Stable serialization of the effective config (hash input)."""
        lines = []
        for section in sorted(self.sections):
            lines.append(f"[{section}]")
            for key in sorted(self.sections[section]):
                value = self.sections[section][key]
                if isinstance(value, list):
                    value = ",".join(repr(v) for v in value)
                lines.append(f"{key} = {value!r}")
        return "\n".join(lines) + "\n"

    def run_id(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def _ledger_payload(ledger: ConstantLedger) -> dict:
    def exact(x):
        return None if x is None else str(Fraction(x))

    payload = {k: v for k, v in ledger.as_floats().items()}
    if payload["gamma"] == float("inf"):
        payload["gamma"] = "inf"  # keep the JSON strictly parseable
    payload.update(
        {
            "a1_exact": exact(ledger.a1),
            "nu_exact": exact(ledger.nu),
            "gamma_exact": exact(ledger.gamma),
            "a2_exact": exact(ledger.a2),
            "dim": ledger.params.dim,
            "delta": ledger.params.delta,
            "delta_prime": ledger.params.delta_prime,
        }
    )
    return payload


@dataclass
class ReportRecord:
    """One command's result payload plus volatile timing."""

    run_id: str
    command: str
    ledger: Optional[ConstantLedger] = None
    estimates: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    seconds: list = field(default_factory=list)
    timestamp: str = field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat()
    )

    def payload(self) -> dict:
        """Deterministic part of the record (no wall-clock entries)."""
        out = {
            "run_id": self.run_id,
            "command": self.command,
            "estimates": self.estimates,
            "gaps": self.gaps,
            "diagnostics": self.diagnostics,
        }
        if self.ledger is not None:
            out["ledger"] = _ledger_payload(self.ledger)
        return out

    def to_json(self) -> str:
        record = self.payload()
        record["timestamp"] = self.timestamp
        record["seconds"] = self.seconds
        return json.dumps(record, sort_keys=True, indent=2) + "\n"


def format_float(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, rows, columns=CSV_COLUMNS) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_float(row[col]) for col in columns])
