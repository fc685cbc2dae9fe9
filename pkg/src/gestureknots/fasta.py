"""Minimal FASTA reader/writer restricted to the DNA alphabet ACGT."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyInput, InvalidBase, MissingHeader

BASES = frozenset("ACGT")


@dataclass(frozen=True)
class DnaSequence:
    id: str
    bases: str

    def __post_init__(self):
        if not self.bases:
            raise EmptyInput(f"record {self.id!r} has no bases")
        for pos, ch in enumerate(self.bases, start=1):
            if ch not in BASES:
                raise InvalidBase(pos, ch, self.id)

    def __len__(self):
        return len(self.bases)

    def __iter__(self):
        return iter(self.bases)


def parse_fasta(text: str, skip_invalid: bool = False) -> list[DnaSequence]:
    """Split records on ``>`` headers, fold sequence lines and case.

    Characters outside ACGT raise ``InvalidBase`` (1-based position within
    the record) unless ``skip_invalid`` is set, in which case they are
    dropped. Blank lines and ``;`` comment lines are ignored.
    """
    if not text or not text.strip():
        raise EmptyInput("no FASTA records in input")
    records: list[tuple[str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            records.append((line[1:].strip(), []))
            continue
        if not records:
            raise MissingHeader(f"sequence data on line {lineno} before any '>' header")
        records[-1][1].append(line)

    out = []
    for rid, chunks in records:
        seq = "".join(chunks).upper()
        seq = "".join(seq.split())
        if skip_invalid:
            seq = "".join(ch for ch in seq if ch in BASES)
        else:
            for pos, ch in enumerate(seq, start=1):
                if ch not in BASES:
                    raise InvalidBase(pos, ch, rid)
        out.append(DnaSequence(rid, seq))
    if not out:
        raise EmptyInput("no FASTA records in input")
    return out


def format_fasta(records, width: int = 60) -> str:
    lines = []
    for r in records:
        lines.append(f">{r.id}")
        for i in range(0, len(r.bases), width):
            lines.append(r.bases[i:i + width])
    return "\n".join(lines) + "\n"
