"""Line-oriented text format for spaces, measures, partitions and verdicts.

    outcomes: a,b,c,d
    mass: 0.25,0.25,0.25,0.25
    cell: a,b
    cell: c,d

Outcome identifiers are written with ``str`` and read back as strings.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import StructuralError
from .core import FiniteMeasure, FiniteSpace, Partition
from .verify import TheoremVerdict


@dataclass(frozen=True)
class SpaceDocument:
    space: FiniteSpace
    measure: FiniteMeasure | None = None
    partition: Partition | None = None


def _ident(o) -> str:
    s = str(o)
    if not s or "," in s or s != s.strip() or "\n" in s:
        raise StructuralError(f"outcome {o!r} has no plain-text identifier")
    return s


def dumps_space(space: FiniteSpace, measure: FiniteMeasure | None = None,
                partition: Partition | None = None) -> str:
    lines = ["outcomes: " + ",".join(_ident(o) for o in space.outcomes)]
    if measure is not None:
        lines.append("mass: " + ",".join(repr(float(m)) for m in measure.mass))
    if partition is not None:
        for cell in partition.cells:
            members = sorted(cell, key=space.index_of)
            lines.append("cell: " + ",".join(_ident(o) for o in members))
    return "\n".join(lines) + "\n"


def loads_space(text: str) -> SpaceDocument:
    outcomes = None
    mass = None
    cells = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise StructuralError(f"line {lineno}: expected 'key: value'")
        items = [v.strip() for v in value.split(",")] if value.strip() else []
        key = key.strip()
        if key == "outcomes":
            outcomes = items
        elif key == "mass":
            mass = [float(v) for v in items]
        elif key == "cell":
            cells.append(items)
        else:
            raise StructuralError(f"line {lineno}: unknown key {key!r}")
    if outcomes is None:
        raise StructuralError("missing 'outcomes:' line")
    space = FiniteSpace(tuple(outcomes))
    measure = FiniteMeasure(space, mass) if mass is not None else None
    partition = Partition.from_cells(space, cells) if cells else None
    return SpaceDocument(space, measure, partition)


def dumps_verdict(verdict: TheoremVerdict) -> str:
    witness = "none" if verdict.witness is None else ",".join(repr(float(m)) for m in verdict.witness.mass)
    return (f"sufficient: {str(verdict.sufficient).lower()}\n"
            f"inherited: {str(verdict.inherited).lower()}\n"
            f"witness_mass: {witness}\n")


def loads_verdict(text: str, space: FiniteSpace | None = None) -> TheoremVerdict:
    fields = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition(":")
            fields[key.strip()] = value.strip()
    try:
        sufficient = {"true": True, "false": False}[fields["sufficient"]]
        inherited = {"true": True, "false": False}[fields["inherited"]]
        witness_text = fields["witness_mass"]
    except KeyError as exc:
        raise StructuralError(f"malformed verdict record: {exc}") from None
    witness = None
    if witness_text != "none":
        masses = [float(v) for v in witness_text.split(",")]
        witness = FiniteMeasure(space or FiniteSpace.of_size(len(masses)), masses)
    return TheoremVerdict(sufficient=sufficient, inherited=inherited, witness=witness)
