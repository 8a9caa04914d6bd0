"""System files: parsing, validation and the bundled examples.

A system file is JSON with ``"schema_version": 1`` and an ``"evaluator"``
field selecting one of three shapes:

``cutsets``
    ``components`` (``id``, ``failure_prob``) and ``cutsets``, a list of
    lists of component ids forming an antichain.
``threshold``
    ``components`` carrying ``capacity`` as well, and a top-level ``demand``.
``dcopf``
    ``buses`` (``id``, ``demand``), ``generators`` (``id``, ``bus``,
    ``capacity``, ``failure_prob``) and ``lines`` (``id``, ``from``, ``to``,
    ``capacity``, ``susceptance``, ``failure_prob``). Generators take ids
    ``1..G`` and lines ``G+1..n`` in file order.

An optional ``reliability_overrides`` object maps component ids (as in the
file) to replacement failure probabilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .dcopf import Bus, DcopfEvaluator, Generator, Line, NetworkModel
from .evaluator import CutsetOracle, Evaluator, ThresholdOracle
from .state import ComponentReliability, SystemState

SCHEMA_VERSION = 1
EVALUATOR_KINDS = ("cutsets", "threshold", "dcopf")


class SystemFileError(ValueError):
    """Invalid system file; the message names the file, line and field."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 field: str | None = None):
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(field)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
        self.path = path
        self.line = line
        self.field = field


@dataclass
class System:
    """An ``n``-component system: structure function plus component reliabilities."""

    name: str
    kind: str
    evaluator: Evaluator
    reliability: ComponentReliability
    component_names: tuple[str, ...] = ()
    network: NetworkModel | None = None
    source: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.evaluator.n != self.reliability.n:
            raise ValueError(
                f"evaluator has {self.evaluator.n} components, reliability has {self.reliability.n}"
            )
        if not self.component_names:
            self.component_names = tuple(str(i) for i in range(1, self.n + 1))

    @property
    def n(self) -> int:
        return self.evaluator.n


def cutset_system(name: str, cutsets: list[list[int]], probs: list[float]) -> System:
    n = len(probs)
    oracle = CutsetOracle([SystemState.of(c, n) for c in cutsets], n)
    return System(name, "cutsets", oracle, ComponentReliability.from_failure_probs(probs))


def threshold_system(name: str, capacities: list[float], demand: float,
                     probs: list[float]) -> System:
    oracle = ThresholdOracle(capacities, demand)
    return System(name, "threshold", oracle, ComponentReliability.from_failure_probs(probs))


def network_system(name: str, net: NetworkModel, threshold: float | None = None) -> System:
    ev = DcopfEvaluator(net, threshold)
    names = tuple(net.component_name(k) for k in range(1, net.n_components + 1))
    return System(name, "dcopf", ev, ComponentReliability.from_failure_probs(net.failure_probs),
                  names, net)


# -- parsing ---------------------------------------------------------------

class _Ctx:
    """Locates JSON fields in the raw text for error messages."""

    def __init__(self, path: str, text: str):
        self.path = path
        self.text = text

    def line_of(self, key: str | None) -> int | None:
        if not key:
            return None
        pos = self.text.find(f'"{key}"')
        return None if pos < 0 else self.text.count("\n", 0, pos) + 1

    def fail(self, message: str, key: str | None = None, where: str | None = None):
        raise SystemFileError(message, self.path, self.line_of(key), where or key)


def _require(ctx: _Ctx, obj: Any, key: str, where: str, kind: type | tuple = object) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        ctx.fail(f"missing field '{key}'", key, where)
    value = obj[key]
    if kind is float:
        kind = (int, float)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        ctx.fail(f"field '{key}' has the wrong type ({type(value).__name__})", key, f"{where}.{key}")
    return value


def _number(ctx: _Ctx, obj: dict, key: str, where: str, *, lo: float = 0.0,
            hi: float = math.inf, default: float | None = None) -> float:
    if default is not None and key not in obj:
        return default
    value = float(_require(ctx, obj, key, where, float))
    if math.isnan(value) or not lo <= value <= hi:
        ctx.fail(f"'{key}' = {value} outside [{lo}, {hi}]", key, f"{where}.{key}")
    return value


def _prob(ctx: _Ctx, obj: dict, where: str) -> float:
    return _number(ctx, obj, "failure_prob", where, hi=1.0)


def _list(ctx: _Ctx, doc: dict, key: str) -> list:
    value = _require(ctx, doc, key, key, list)
    return value


def _parse_cutsets(ctx: _Ctx, doc: dict) -> tuple[list[str], list[float], Evaluator, None]:
    comps = _list(ctx, doc, "components")
    ids, probs = [], []
    for i, c in enumerate(comps):
        where = f"components[{i}]"
        ids.append(str(_require(ctx, c, "id", where, (str, int))))
        probs.append(_prob(ctx, c, where))
    _unique(ctx, ids, "components")
    index = {cid: k + 1 for k, cid in enumerate(ids)}
    n = len(ids)
    cuts = []
    for i, cs in enumerate(_list(ctx, doc, "cutsets")):
        if not isinstance(cs, list) or not cs:
            ctx.fail("each cut set must be a non-empty list of component ids", "cutsets",
                     f"cutsets[{i}]")
        members = []
        for cid in cs:
            if str(cid) not in index:
                ctx.fail(f"unknown component id {cid!r}", "cutsets", f"cutsets[{i}]")
            members.append(index[str(cid)])
        cuts.append(SystemState.of(members, n))
    try:
        ev = CutsetOracle(cuts, n)
    except ValueError as exc:
        ctx.fail(str(exc), "cutsets")
    return ids, probs, ev, None


def _parse_threshold(ctx: _Ctx, doc: dict) -> tuple[list[str], list[float], Evaluator, None]:
    comps = _list(ctx, doc, "components")
    ids, probs, caps = [], [], []
    for i, c in enumerate(comps):
        where = f"components[{i}]"
        ids.append(str(_require(ctx, c, "id", where, (str, int))))
        probs.append(_prob(ctx, c, where))
        caps.append(_number(ctx, c, "capacity", where))
    _unique(ctx, ids, "components")
    demand = _number(ctx, doc, "demand", "demand")
    if not ids:
        ctx.fail("at least one component is required", "components")
    return ids, probs, ThresholdOracle(caps, demand), None


def _parse_dcopf(ctx: _Ctx, doc: dict) -> tuple[list[str], list[float], Evaluator, NetworkModel]:
    buses = []
    for i, b in enumerate(_list(ctx, doc, "buses")):
        where = f"buses[{i}]"
        buses.append(Bus(str(_require(ctx, b, "id", where, (str, int))),
                         _number(ctx, b, "demand", where, default=0.0)))
    _unique(ctx, [b.id for b in buses], "buses")
    known = {b.id for b in buses}
    gens = []
    for i, g in enumerate(_list(ctx, doc, "generators")):
        where = f"generators[{i}]"
        bus = str(_require(ctx, g, "bus", where, (str, int)))
        if bus not in known:
            ctx.fail(f"generator refers to unknown bus {bus!r}", "bus", f"{where}.bus")
        gens.append(Generator(str(_require(ctx, g, "id", where, (str, int))), bus,
                              _number(ctx, g, "capacity", where), _prob(ctx, g, where)))
    lines = []
    for i, ln in enumerate(_list(ctx, doc, "lines")):
        where = f"lines[{i}]"
        ends = []
        for key in ("from", "to"):
            bus = str(_require(ctx, ln, key, where, (str, int)))
            if bus not in known:
                ctx.fail(f"line refers to unknown bus {bus!r}", key, f"{where}.{key}")
            ends.append(bus)
        if ends[0] == ends[1]:
            ctx.fail("line joins a bus to itself", "lines", where)
        sus = _number(ctx, ln, "susceptance", where)
        if sus <= 0:
            ctx.fail("susceptance must be positive", "susceptance", f"{where}.susceptance")
        lines.append(Line(str(_require(ctx, ln, "id", where, (str, int))), ends[0], ends[1],
                          _number(ctx, ln, "capacity", where), sus, _prob(ctx, ln, where)))
    _unique(ctx, [g.id for g in gens] + [ln.id for ln in lines], "generators")
    net = NetworkModel(tuple(buses), tuple(gens), tuple(lines))
    if net.n_components == 0:
        ctx.fail("network has no generators or lines", "generators")
    threshold = None
    if "shed_threshold" in doc:
        threshold = _number(ctx, doc, "shed_threshold", "shed_threshold")
    ids = [g.id for g in gens] + [ln.id for ln in lines]
    return ids, net.failure_probs, DcopfEvaluator(net, threshold), net


def _unique(ctx: _Ctx, ids: list[str], key: str) -> None:
    seen = set()
    for cid in ids:
        if cid in seen:
            ctx.fail(f"duplicate id {cid!r}", key)
        seen.add(cid)


_PARSERS = {"cutsets": _parse_cutsets, "threshold": _parse_threshold, "dcopf": _parse_dcopf}


def parse_system(text: str, path: str = "<string>") -> System:
    """Parse and validate the JSON text of a system file."""
    ctx = _Ctx(path, text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"invalid JSON: {exc.msg}", path, exc.lineno) from exc
    if not isinstance(doc, dict):
        ctx.fail("top level must be an object")
    version = _require(ctx, doc, "schema_version", "schema_version", int)
    if version != SCHEMA_VERSION:
        ctx.fail(f"unsupported schema_version {version}", "schema_version")
    kind = _require(ctx, doc, "evaluator", "evaluator", str)
    if kind not in _PARSERS:
        ctx.fail(f"unknown evaluator {kind!r}; expected one of {', '.join(EVALUATOR_KINDS)}",
                 "evaluator")
    name = str(doc.get("name", Path(path).stem))
    ids, probs, ev, net = _PARSERS[kind](ctx, doc)

    overrides = doc.get("reliability_overrides", {})
    if not isinstance(overrides, dict):
        ctx.fail("must map component ids to probabilities", "reliability_overrides")
    index = {cid: k for k, cid in enumerate(ids)}
    probs = list(probs)
    for cid, p in overrides.items():
        if cid not in index:
            ctx.fail(f"unknown component id {cid!r}", "reliability_overrides",
                     f"reliability_overrides.{cid}")
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
            ctx.fail(f"probability {p!r} not in [0, 1]", "reliability_overrides",
                     f"reliability_overrides.{cid}")
        probs[index[cid]] = float(p)

    meta = {k: doc[k] for k in ("description", "source") if k in doc}
    return System(name, kind, ev, ComponentReliability.from_failure_probs(probs), tuple(ids),
                  net, path, meta)


def bundled_systems() -> list[str]:
    """File names of the systems shipped with the package."""
    root = resources.files("latticerel") / "data"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def resolve_system_path(path: str | Path) -> Path:
    """``path`` itself if it exists, else the bundled file of that name."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix else f"{p.name}.json"
    bundled = resources.files("latticerel") / "data" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise SystemFileError("no such file (and no bundled system of that name)", str(path))


def load_system(path: str | Path) -> System:
    """Load a system file, falling back to the bundled copies by name."""
    p = resolve_system_path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemFileError(f"cannot read file: {exc.strerror}", str(path)) from exc
    return parse_system(text, str(path))
