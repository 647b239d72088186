"""Persistence of tables and verdicts, plus the run manifest.

Conventions: CSV for tables, JSON for structured verdicts, newline
delimited words for languages. Every payload starts with (or contains)
the configuration digest. Floats are written with repr so values round
trip exactly and repeated runs produce byte-identical files; wall-clock
time lives only in the manifest, never in payloads.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .gluing import GapRow
from .pressure import PartitionTable, PressureBracket
from .transfer import MarkovMeasure, PerronData, cylinder_measure
from .verify import BoundReport
from .words import format_word


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    digest: str,
    flags: dict | None = None,
) -> Path:
    path = Path(path)
    lines = [f"# config_digest={digest}"]
    for key in sorted(flags or {}):
        lines.append(f"# {key}={_cell((flags or {})[key])}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, float):
        return value
    return str(value)


def write_json(path: str | Path, payload: dict, digest: str) -> Path:
    path = Path(path)
    body = dict(_jsonable(payload))
    body["config_digest"] = digest
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")
    return path


def write_words(path: str | Path, words: Iterable[tuple]) -> Path:
    path = Path(path)
    path.write_text("".join(format_word(w) + "\n" for w in words))
    return path


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# payload builders
# ---------------------------------------------------------------------------

PARTITION_HEADER = ("n", "count", "lnz_lo", "lnz_hi")
BRACKET_HEADER = ("n", "lower", "upper")
GAP_HEADER = (
    "n", "f_declared", "f_empirical",
    "witness_v", "witness_u", "witness_w",
    "status", "coverage",
)
ANCHOR_HEADER = ("k", "epsilon", "n", "score")


def partition_rows(table: PartitionTable):
    for row in table.rows:
        yield (row.n, row.count, row.lnz_lo, row.lnz_hi)


def bracket_rows(bracket: PressureBracket):
    for row in bracket.rows:
        lo = None if row.lo == float("-inf") else row.lo
        yield (row.n, lo, row.hi)


def gap_profile_rows(rows: Iterable[GapRow]):
    for r in rows:
        v, u, w = ("", "", "")
        if r.witness is not None:
            v, u, w = (format_word(x) for x in r.witness)
        yield (r.n, r.f_declared, r.f_empirical, v, u, w, r.status, r.coverage)


def bound_report_payload(rep: BoundReport) -> dict:
    return {
        "check": rep.check,
        "verdict": rep.verdict,
        "margins": [[n, m] for n, m in rep.margins],
        "witnesses": rep.witnesses,
        "extra": rep.extra,
    }


def equilibrium_payload(mm: MarkovMeasure, pd: PerronData) -> dict:
    model = mm.model
    payload = {
        "n_state": model.n_state,
        "state_count": model.state_count,
        "lambda": mm.lam,
        "ln_lambda": math.log(mm.lam),
        "entropy": mm.entropy,
        "phi_integral": mm.phi_integral,
        "identity_gap": mm.identity_gap,
        "stationarity_gap": mm.stationarity_gap,
        "residual": pd.residual,
        "iterations": pd.iterations,
        "stationary": {
            format_word(state): float(p)
            for state, p in zip(model.states, mm.pi)
        },
        "symbol_cylinders": {
            str(s): cylinder_measure(mm, (s,))
            for s in range(model.spec.alphabet_size)
        },
    }
    return payload


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------


@dataclass
class RunManifest:
    config_digest: str
    command: str
    artifact_version: str = __version__
    wall_clock_s: float = 0.0
    status: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def record(self, path: str | Path) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def payload(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "command": self.command,
            "artifact_version": self.artifact_version,
            "wall_clock_s": self.wall_clock_s,
            "status": _jsonable(self.status),
            "outputs": dict(sorted(self.outputs.items())),
        }


def write_manifest(manifest: RunManifest, out_dir: str | Path) -> Path:
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest.payload(), sort_keys=True, indent=2) + "\n")
    return path
