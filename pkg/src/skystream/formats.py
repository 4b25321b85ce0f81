"""File formats: repository CSV, stream files, rule configs, answer files."""
from __future__ import annotations

import csv
from pathlib import Path

from .dd import DDRule
from .index import Repository
from .model import StreamObject

MISSING = "-"


def load_repository(path) -> tuple[Repository, list[str]]:
    """Header-bearing CSV, one complete sample per row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(cell) for cell in row] for row in reader if row]
    return Repository(rows), header


def write_repository(path, samples, header) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in samples:
            writer.writerow([repr(float(v)) for v in row])


def parse_rules(text: str, header: list[str]) -> list[DDRule]:
    """One rule per line: ``X1,X2,...->Aj : eps_X1,...,eps_Aj``."""
    positions = {name.strip(): i for i, name in enumerate(header)}
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, tail = line.split(":", 1)
            lhs, rhs = head.split("->", 1)
            dets = [positions[a.strip()] for a in lhs.split(",")]
            dep = positions[rhs.strip()]
            eps = [float(x) for x in tail.split(",")]
        except (ValueError, KeyError) as err:
            raise ValueError(f"rule line {lineno}: cannot parse {line!r}: {err}")
        if len(eps) != len(dets) + 1:
            raise ValueError(
                f"rule line {lineno}: expected {len(dets) + 1} tolerances")
        pairs = tuple(zip(dets, eps[:-1])) + ((dep, eps[-1]),)
        rules.append(DDRule(frozenset(dets), dep, pairs))
    if not rules:
        raise ValueError("no rules found")
    return rules


def load_rules(path, header) -> list[DDRule]:
    return parse_rules(Path(path).read_text(), header)


def format_rules(rules, header) -> str:
    lines = []
    for r in rules:
        dets = sorted(r.determinants)
        lhs = ",".join(header[a] for a in dets)
        eps = [r.eps_of(a) for a in dets] + [r.eps_of(r.dependent)]
        lines.append(f"{lhs}->{header[r.dependent]} : "
                     + ",".join(format(e, "g") for e in eps))
    return "\n".join(lines) + "\n"


def load_stream(path) -> tuple[list[StreamObject], list[str]]:
    """Header then rows ``id,arr,exp,a1,...,ad`` with ``-`` for missing."""
    objects = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for row in reader:
            if not row:
                continue
            attrs = tuple(None if cell.strip() == MISSING else float(cell)
                          for cell in row[3:])
            objects.append(StreamObject(row[0], int(row[1]), int(row[2]), attrs))
    return objects, header[3:]


def write_stream(path, objects, attr_names) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "arr", "exp"] + list(attr_names))
        for obj in objects:
            cells = [MISSING if v is None else repr(float(v))
                     for v in obj.attrs]
            writer.writerow([obj.id, obj.arr, obj.exp] + cells)


def write_answers(path, answer_sets) -> None:
    """One line per tick: ``t: id1@p1 id2@p2 ...``, ids ascending."""
    with open(path, "w") as fh:
        for ans in answer_sets:
            fh.write(ans.format_line() + "\n")


def load_answers(path) -> dict[int, dict[str, float]]:
    out: dict[int, dict[str, float]] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, tail = line.partition(":")
        members = {}
        for token in tail.split():
            oid, _, prob = token.partition("@")
            members[oid] = float(prob)
        out[int(head)] = members
    return out


def write_metrics(path, metrics: dict) -> None:
    with open(path, "w") as fh:
        for key, value in metrics.items():
            fh.write(f"{key}={value}\n")
