"""Reports: one structure for every method, with JSON and CSV emitters.

Stored numbers are plain probabilities; percentages only appear in
:func:`render_text`. Wall-clock fields are left out unless asked for, so
replays of a command produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .baselines import McsResult, OracleResult, SeResult
from .csilp import CsilpResult, TraceRow
from .state import SystemState

SCHEMA_VERSION = 1
TRACE_COLUMNS = ("evals", "lower", "upper", "gap", "elapsed_ms")
CRITICAL_COLUMNS = (
    "sequence", "state", "level", "probability", "shed", "risk", "delta_lolp",
    "lolp_at_identification", "evaluations_at_identification",
)


def _finite(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _trace(rows: list[TraceRow], timing: bool) -> list[dict]:
    out = []
    for t in rows:
        row = {"evals": t.evaluations, "lower": t.lower, "upper": t.upper, "gap": t.gap}
        if timing:
            row["elapsed_ms"] = round(t.elapsed_ms, 3)
        out.append(row)
    return out


def _comps(s: SystemState) -> list[int]:
    return list(s.components)


@dataclass
class Report:
    method: str
    system: str
    n: int
    criteria: dict
    lolp: float
    lolp_lower: float | None
    lolp_upper: float | None
    gap: float | None
    evaluation_count: int
    stop_reason: str
    critical_records: list[dict] = field(default_factory=list)
    failure_lattice_count: int | None = None
    failure_lattices: list[list[list[int]]] = field(default_factory=list)
    normal_cells: list[list[list[int]]] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    wall_time: float | None = None
    error: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> Report:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {data.get('schema_version')!r}")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown report fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in self.trace:
            w.writerow([row["evals"], repr(row["lower"]), repr(row["upper"]), repr(row["gap"]),
                        row.get("elapsed_ms", "")])
        return buf.getvalue()

    def critical_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CRITICAL_COLUMNS)
        for i, rec in enumerate(self.critical_records, start=1):
            w.writerow([
                i, " ".join(str(c) for c in rec["state"]), rec["level"],
                repr(rec["probability"]), "" if rec["shed"] is None else repr(rec["shed"]),
                "" if rec["risk"] is None else repr(rec["risk"]), repr(rec["delta_lolp"]),
                repr(rec["lolp_at_identification"]), rec["evaluations_at_identification"],
            ])
        return buf.getvalue()


def from_csilp(res: CsilpResult, *, timing: bool = False, cells: bool = True) -> Report:
    led = res.ledger
    records = [
        {
            "state": _comps(r.state),
            "level": r.level,
            "probability": r.probability,
            "shed": r.shed,
            "risk": r.risk,
            "delta_lolp": r.delta_lolp,
            "lolp_at_identification": r.lolp_at_identification,
            "evaluations_at_identification": r.evaluations_at_identification,
            "failure_lattice_count": r.failure_lattice_count,
        }
        for r in res.records
    ]
    levels: dict[str, int] = {}
    for r in res.records:
        levels[str(r.level)] = levels.get(str(r.level), 0) + 1
    return Report(
        method="csilp",
        system=res.system,
        n=res.n,
        criteria=res.criteria.as_dict(),
        lolp=res.lolp,
        lolp_lower=res.bounds.lower,
        lolp_upper=res.bounds.upper,
        gap=res.bounds.gap,
        evaluation_count=res.evaluations,
        stop_reason=res.stop_reason,
        critical_records=records,
        failure_lattice_count=len(led.failure_lattices),
        failure_lattices=[[_comps(l.lower), _comps(l.upper)] for l in led.failure_lattices] if cells else [],
        normal_cells=[[_comps(l.lower), _comps(l.upper)] for l in led.normal_cells] if cells else [],
        trace=_trace(led.trace, timing),
        extra={
            "tight_upper": res.tight_upper,
            "critical_count_by_level": levels,
            "normal_cell_count": len(led.normal_cells),
            "frontier_size": len(led.frontier),
            "levels_completed": led.level,
        },
        wall_time=round(res.wall_time, 6) if timing else None,
        error=res.error,
    )


def from_se(res: SeResult, *, timing: bool = False) -> Report:
    return Report(
        method="se",
        system=res.system,
        n=res.n,
        criteria=res.criteria.as_dict(),
        lolp=res.lolp_lower,
        lolp_lower=res.lolp_lower,
        lolp_upper=res.lolp_upper,
        gap=res.gap,
        evaluation_count=res.evaluations,
        stop_reason=res.stop_reason,
        trace=_trace(res.trace, timing),
        extra={"failure_states": res.failures, "levels_completed": res.last_level},
        wall_time=round(res.wall_time, 6) if timing else None,
        error=res.error,
    )


def from_mcs(res: McsResult, *, timing: bool = False) -> Report:
    s = res.settings
    return Report(
        method="mcs",
        system=res.system,
        n=res.n,
        criteria={"max_samples": s.max_samples, "target_cov": s.target_cov,
                  "min_samples": s.min_samples},
        lolp=res.estimate,
        lolp_lower=None,
        lolp_upper=None,
        gap=None,
        evaluation_count=res.evaluations,
        stop_reason=res.stop_reason,
        extra={
            "samples": res.samples,
            "failures": res.failures,
            "cov": _finite(res.cov),
            "sigma": res.sigma,
            "seed": s.seed,
            "rng": res.rng,
            "batch_size": s.batch_size,
            "history": [[k, est, _finite(cov)] for k, est, cov in res.history],
        },
        wall_time=round(res.wall_time, 6) if timing else None,
        error=res.error,
    )


def from_oracle(res: OracleResult, *, timing: bool = False) -> Report:
    return Report(
        method="oracle",
        system=res.system,
        n=res.n,
        criteria={},
        lolp=res.lolp_exact,
        lolp_lower=res.lolp_exact,
        lolp_upper=res.lolp_exact,
        gap=0.0,
        evaluation_count=res.evaluations,
        stop_reason="complete",
        extra={
            "minimal_cut_sets": [_comps(c) for c in res.minimal_cut_sets],
            "failure_states": res.failure_count,
        },
        wall_time=round(res.wall_time, 6) if timing else None,
    )


def history_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("samples", "estimate", "cov"))
    for k, est, cov in report.extra.get("history", []):
        w.writerow([k, repr(est), "" if cov is None else repr(cov)])
    return buf.getvalue()


def write_report(report: Report, out_dir: str | Path, fmt: str = "json") -> list[Path]:
    """Write ``report`` into ``out_dir``; returns the files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        p = out / "report.json"
        p.write_text(report.to_json(), encoding="utf-8")
        written.append(p)
    elif fmt == "csv":
        if report.trace:
            p = out / "trace.csv"
            p.write_text(report.trace_csv(), encoding="utf-8")
            written.append(p)
        if report.critical_records:
            p = out / "critical_states.csv"
            p.write_text(report.critical_csv(), encoding="utf-8")
            written.append(p)
        if report.method == "mcs":
            p = out / "mcs_history.csv"
            p.write_text(history_csv(report), encoding="utf-8")
            written.append(p)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return written


def load_report(path: str | Path) -> Report:
    return Report.from_json(Path(path).read_text(encoding="utf-8"))


def _pct(x: Any) -> str:
    return "n/a" if x is None else f"{100.0 * x:.10f}%"


def render_text(report: Report) -> str:
    """Human-readable summary (percentages)."""
    lines = [
        f"method      : {report.method}",
        f"system      : {report.system} (n = {report.n})",
        f"LOLP        : {_pct(report.lolp)}",
    ]
    if report.lolp_lower is not None:
        lines += [
            f"lower bound : {_pct(report.lolp_lower)}",
            f"upper bound : {_pct(report.lolp_upper)}",
            f"gap         : {_pct(report.gap)}",
        ]
    lines.append(f"evaluations : {report.evaluation_count}")
    lines.append(f"stopped by  : {report.stop_reason}")
    if report.failure_lattice_count is not None:
        lines.append(f"failure lattices: {report.failure_lattice_count}")
    if report.method == "mcs":
        ex = report.extra
        lines.append(f"samples     : {ex['samples']}  cov = {ex['cov']}  seed = {ex['seed']}")
    if report.critical_records:
        lines.append("critical states (discovery order):")
        for i, r in enumerate(report.critical_records, start=1):
            shed = "-" if r["shed"] is None else f"{r['shed']:.4g}"
            lines.append(
                f"  {i:4d}  {{{','.join(map(str, r['state']))}}}  level {r['level']}  "
                f"shed {shed}  dLOLP {_pct(r['delta_lolp'])}"
            )
    if "minimal_cut_sets" in report.extra:
        lines.append("minimal cut sets:")
        for c in report.extra["minimal_cut_sets"]:
            lines.append(f"  {{{','.join(map(str, c))}}}")
    if report.error:
        lines.append(f"error       : {report.error}")
    return "\n".join(lines) + "\n"
