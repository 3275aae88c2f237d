"""End-to-end verification: generate, eliminate, filter, compute, record.

Each candidate diagram goes through pass-move elimination, then the
determinant filter, then the bracket. One record line is written per knot
diagram (links are only counted). Work is split into shards by candidate
index; each shard writes its own part file and checkpoint, and the parts
are merged in candidate order at the end, so the merged file does not
depend on the number of workers.
"""

from __future__ import annotations

import hashlib
import multiprocessing as mp
import os
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .bracket import FrontierWidthError, bracket_dc, jones_f
from .determinant import determinant_goeritz
from .generation import CLASSES, Candidate, GenerationCursor, candidates
from .pd import PlanarDiagram, canonical_pd_key, dt_code, format_pd, parse_pd, pd_validate
from .polynomial import is_unit_monomial
from .reduction import find_pass_move
from .tangles import ConwayPolyhedron, default_catalog, load_catalog

__all__ = [
    "VerificationRecord",
    "RunReport",
    "RunConfig",
    "Checkpoint",
    "CheckpointError",
    "AbortRun",
    "process_diagram",
    "run_verification",
    "checkpoint_save",
    "checkpoint_load",
    "merge_parts",
    "read_records",
    "export_flagged",
    "STAGES",
]

STAGES = ("generated", "reduced-away", "det-filtered", "bracket-computed", "unresolved")
COUNTERS = (
    "generated",
    "skipped-multicomponent",
    "eliminated-by-pass-move",
    "det-filtered",
    "bracket-computed",
    "unresolved",
    "flagged",
)


class CheckpointError(ValueError):
    """A checkpoint file is corrupt or does not match the run."""


class AbortRun(RuntimeError):
    """The run stopped early on request; its checkpoint is resumable."""


@dataclass(frozen=True)
class VerificationRecord:
    pd: str
    src: str
    stage: str
    det: int | None = None
    f: str | None = None
    flag: str = "0"  # "0", "1" or "unresolved"

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.flag not in ("0", "1", "unresolved"):
            raise ValueError(f"bad flag {self.flag!r}")
        if self.flag == "1" and (self.det != 1 or self.f is None):
            raise ValueError("a flagged record needs det=1 and an f-polynomial")
        if self.stage == "bracket-computed" and self.det != 1:
            raise ValueError("bracket computed on a diagram with det != 1")

    @property
    def flagged(self) -> bool:
        return self.flag == "1"

    def to_line(self) -> str:
        det = "-" if self.det is None else str(self.det)
        f = "-" if self.f is None else self.f
        return f"pd={self.pd}\tsrc={self.src}\tstage={self.stage}\tdet={det}\tf={f}\tflag={self.flag}"

    @classmethod
    def from_line(cls, line: str) -> "VerificationRecord":
        parts = line.rstrip("\n").split("\t")
        names = ("pd", "src", "stage", "det", "f", "flag")
        if len(parts) != len(names):
            raise ValueError(f"record needs {len(names)} fields: {line!r}")
        vals = {}
        for name, part in zip(names, parts):
            key, sep, val = part.partition("=")
            if key != name or not sep:
                raise ValueError(f"expected field {name}= in {line!r}")
            vals[name] = val
        return cls(
            pd=vals["pd"],
            src=vals["src"],
            stage=vals["stage"],
            det=None if vals["det"] == "-" else int(vals["det"]),
            f=None if vals["f"] == "-" else vals["f"],
            flag=vals["flag"],
        )

    def sort_key(self) -> tuple:
        return src_key(self.src)


def src_key(src: str) -> tuple:
    cls, budget, index = src.split("/")
    return (CLASSES.index(cls), int(budget), int(index))


@dataclass
class RunReport:
    counters: dict = field(default_factory=lambda: dict.fromkeys(COUNTERS, 0))
    distinct_candidates: int = 0
    wall_time: float = 0.0
    shard: tuple[int, int] = (0, 1)
    max_crossings: int = 0
    classes: tuple[str, ...] = ()

    def telescopes(self) -> bool:
        c = self.counters
        return c["generated"] == (
            c["skipped-multicomponent"]
            + c["eliminated-by-pass-move"]
            + c["det-filtered"]
            + c["bracket-computed"]
            + c["unresolved"]
        )

    def add(self, other: dict) -> None:
        for k, v in other.items():
            self.counters[k] = self.counters.get(k, 0) + v

    def summary(self) -> str:
        parts = [f"{k}={v}" for k, v in self.counters.items()]
        parts.append(f"distinct-candidates={self.distinct_candidates}")
        parts.append(f"shard={self.shard[0]}/{self.shard[1]}")
        parts.append(f"max-crossings={self.max_crossings}")
        parts.append(f"wall-time={self.wall_time:.1f}s")
        return " ".join(parts)


def process_diagram(
    d: PlanarDiagram,
    src: str = "-",
    max_bridge: int | None = None,
    width_cap: int = 16,
) -> VerificationRecord:
    """Run one knot diagram through elimination, determinant and bracket."""
    text = format_pd(d)
    if find_pass_move(d, max_bridge) is not None:
        return VerificationRecord(text, src, "reduced-away")
    det = determinant_goeritz(d)
    if det != 1:
        return VerificationRecord(text, src, "det-filtered", det)
    try:
        br = bracket_dc(d, width_cap=width_cap)
    except FrontierWidthError:
        return VerificationRecord(text, src, "unresolved", det, None, "unresolved")
    f = jones_f(d, br)
    flag = "1" if is_unit_monomial(f) else "0"
    return VerificationRecord(text, src, "bracket-computed", det, f.format("A"), flag)


# -- checkpoints --------------------------------------------------------------

@dataclass(frozen=True)
class Checkpoint:
    cursor: GenerationCursor | None  # None once the shard is finished
    counters: dict
    out_bytes: int
    distinct: tuple = ()


_MAGIC = "knotverify-checkpoint 1"


def checkpoint_save(path, state: Checkpoint) -> None:
    lines = [_MAGIC]
    lines.append(state.cursor.serialize() if state.cursor else "cursor done")
    lines.append("counters " + " ".join(f"{k}={v}" for k, v in state.counters.items()))
    lines.append(f"out-bytes {state.out_bytes}")
    lines.append("distinct " + " ".join(state.distinct))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(body + f"sha256 {digest}\n", encoding="utf-8")
    os.replace(tmp, path)


def checkpoint_load(path) -> Checkpoint:
    text = Path(path).read_text(encoding="utf-8")
    body, sep, tail = text.rpartition("sha256 ")
    if not sep or hashlib.sha256(body.encode()).hexdigest() != tail.strip():
        raise CheckpointError(f"checkpoint {path} failed its checksum")
    lines = body.splitlines()
    try:
        if lines[0] != _MAGIC:
            raise CheckpointError("not a checkpoint file")
        cursor = None if lines[1] == "cursor done" else GenerationCursor.parse(lines[1])
        counters = {}
        for item in lines[2].split()[1:]:
            k, v = item.split("=")
            counters[k] = int(v)
        out_bytes = int(lines[3].split()[1])
        distinct = tuple(lines[4].split()[1:])
    except (IndexError, ValueError, KeyError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"checkpoint {path} is malformed: {exc}") from exc
    return Checkpoint(cursor, counters, out_bytes, distinct)


# -- running ------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    max_crossings: int
    classes: tuple[str, ...] = ("algebraic",)
    shard: tuple[int, int] = (0, 1)
    catalog_path: str | None = None
    checkpoint: str | None = None
    out: str = "records.txt"
    max_bridge: int | None = None
    progress: int = 0
    jobs: int = 1
    abort_after: int | None = None
    checkpoint_every: int = 500
    width_cap: int = 16


def _catalog(cfg: RunConfig) -> list[ConwayPolyhedron]:
    if "polyhedral" not in cfg.classes:
        return []
    return load_catalog(cfg.catalog_path) if cfg.catalog_path else default_catalog()


def _worker_paths(cfg: RunConfig, j: int, jobs: int):
    part = f"{cfg.out}.part{j}of{jobs}"
    ckpt = f"{cfg.checkpoint}.{j}of{jobs}" if cfg.checkpoint else None
    return part, ckpt


def _distinct_key(d: PlanarDiagram) -> str:
    key = canonical_pd_key(d)
    return hashlib.sha1(repr(key).encode()).hexdigest()[:16]


def _run_worker(cfg: RunConfig, j: int, jobs: int) -> tuple[dict, tuple, bool]:
    """Process one sub-shard; returns (counters, distinct keys, finished)."""
    si, sk = cfg.shard
    shard = (si + sk * j, sk * jobs)
    part, ckpt = _worker_paths(cfg, j, jobs)
    counters = dict.fromkeys(COUNTERS, 0)
    distinct: set[str] = set()
    start = None
    if ckpt and os.path.exists(ckpt):
        state = checkpoint_load(ckpt)
        counters.update(state.counters)
        distinct = set(state.distinct)
        if state.cursor is None:
            return counters, tuple(sorted(distinct)), True
        start = state.cursor
        if not os.path.exists(part) or os.path.getsize(part) < state.out_bytes:
            raise CheckpointError(f"part file {part} is shorter than its checkpoint")
        with open(part, "r+b") as fh:
            fh.truncate(state.out_bytes)
        mode = "a"
    else:
        mode = "w"
    catalog = _catalog(cfg)
    processed = 0
    last_cand = None
    with open(part, mode, encoding="utf-8", newline="\n") as out:

        def save(cursor):
            out.flush()
            if ckpt:
                checkpoint_save(ckpt, Checkpoint(cursor, dict(counters), out.tell(), tuple(sorted(distinct))))

        for cand in candidates(cfg.classes, cfg.max_crossings, catalog, shard, start):
            if cfg.abort_after is not None and processed >= cfg.abort_after:
                save(GenerationCursor(cand.cls, cand.budget, cand.index))
                return counters, tuple(sorted(distinct)), False
            counters["generated"] += 1
            if cand.diagram is None:
                counters["skipped-multicomponent"] += 1
            else:
                rec = process_diagram(cand.diagram, cand.src, cfg.max_bridge, cfg.width_cap)
                key = {
                    "reduced-away": "eliminated-by-pass-move",
                    "det-filtered": "det-filtered",
                    "bracket-computed": "bracket-computed",
                    "unresolved": "unresolved",
                }[rec.stage]
                counters[key] += 1
                if rec.flagged:
                    counters["flagged"] += 1
                if rec.stage in ("bracket-computed", "unresolved"):
                    distinct.add(_distinct_key(cand.diagram))
                out.write(rec.to_line() + "\n")
            processed += 1
            last_cand = cand
            if cfg.progress and counters["generated"] % cfg.progress == 0:
                print(
                    f"[shard {shard[0]}/{shard[1]}] "
                    + " ".join(f"{k}={v}" for k, v in counters.items()),
                    file=sys.stderr,
                    flush=True,
                )
            if ckpt and processed % cfg.checkpoint_every == 0:
                save(GenerationCursor(cand.cls, cand.budget, cand.index + 1))
        save(None)
    return counters, tuple(sorted(distinct)), True


def _worker_entry(args):
    cfg, j, jobs = args
    return _run_worker(cfg, j, jobs)


def merge_parts(parts: Sequence[str], out: str) -> None:
    """Merge part files into ``out`` in candidate order."""
    records = []
    for p in parts:
        with open(p, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    records.append((src_key(VerificationRecord.from_line(line).src), line))
    records.sort(key=lambda r: r[0])
    tmp = out + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for _, line in records:
            fh.write(line if line.endswith("\n") else line + "\n")
    os.replace(tmp, out)


def run_verification(cfg: RunConfig) -> RunReport:
    """Run (or resume) a verification; raises AbortRun when stopped early."""
    t0 = time.time()
    for cls in cfg.classes:
        if cls not in CLASSES:
            raise ValueError(f"unknown class {cls!r}")
    _catalog(cfg)  # fail early on an unreadable catalog
    jobs = max(1, cfg.jobs)
    args = [(cfg, j, jobs) for j in range(jobs)]
    if jobs == 1:
        results = [_worker_entry(args[0])]
    else:
        ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
        with ctx.Pool(jobs) as pool:
            results = pool.map(_worker_entry, args)
    report = RunReport(shard=cfg.shard, max_crossings=cfg.max_crossings, classes=tuple(cfg.classes))
    distinct: set[str] = set()
    finished = True
    for counters, keys, done in results:
        report.add(counters)
        distinct.update(keys)
        finished = finished and done
    report.distinct_candidates = len(distinct)
    report.wall_time = time.time() - t0
    if not finished:
        raise AbortRun(report.summary())
    parts = [_worker_paths(cfg, j, jobs)[0] for j in range(jobs)]
    merge_parts(parts, cfg.out)
    for j in range(jobs):
        part, ckpt = _worker_paths(cfg, j, jobs)
        os.remove(part)
        if ckpt and os.path.exists(ckpt):
            os.remove(ckpt)
    return report


# -- records and export -------------------------------------------------------

def read_records(path) -> Iterator[VerificationRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield VerificationRecord.from_line(line)


def export_flagged(records: Iterable[VerificationRecord], fmt: str, path) -> int:
    """Write flagged diagrams one per line as PD text or DT codes."""
    if fmt not in ("pd", "dt"):
        raise ValueError(f"unknown export format {fmt!r}")
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            if not rec.flagged:
                continue
            d = parse_pd(rec.pd)
            if pd_validate(d):
                raise ValueError(f"flagged record {rec.src} is not a valid knot diagram")
            if fmt == "pd":
                fh.write(format_pd(d) + "\n")
            else:
                fh.write(" ".join(str(x) for x in dt_code(d)) + "\n")
            count += 1
    return count
