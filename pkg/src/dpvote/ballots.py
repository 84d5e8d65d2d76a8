"""Plain-text ballot files.

Two line formats are accepted and may be mixed:

* ``a>b>c`` -- one ranking, alternatives by name, most preferred first;
* ``3: 1,2,3`` -- ``count`` identical ballots over 1-based indices, the
  strict-complete-order subset of the usual election-data layout.

Comment lines start with ``#``.  A ``# m=3 n=5`` header is checked against
the parsed ballots, and ``# ALTERNATIVE NAME i: name`` lines name the
indices used by count lines.  Ties or grouped candidates are rejected.
"""

from __future__ import annotations

import re
import string
from typing import Sequence

from dpvote.core import Profile

_HEADER = re.compile(r"^#\s*m\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s*$", re.IGNORECASE)
_ALT_NAME = re.compile(r"^#\s*ALTERNATIVE NAME\s+(\d+)\s*:\s*(.+?)\s*$", re.IGNORECASE)
_COUNT_LINE = re.compile(r"^(\d+)\s*:\s*(.+)$")
_TIE_CHARS = set("{}()[]=~")


class BallotFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def default_names(m: int) -> list[str]:
    if m <= 26:
        return list(string.ascii_lowercase[:m])
    return [f"a{i + 1}" for i in range(m)]


def parse_ballots(text: str) -> tuple[Profile, list[str]]:
    """Parse ballot text into a profile plus the alternative names by index.

    Named ballots get their alternatives indexed in sorted name order, so
    ``a>b>c`` maps ``a`` to 0.  Count lines use their given indices.
    """
    header: tuple[int, int] | None = None
    index_names: dict[int, str] = {}
    named: list[tuple[int, list[str]]] = []
    counted: list[tuple[int, int, list[int]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if mh := _HEADER.match(line):
                header = (int(mh.group(1)), int(mh.group(2)))
            elif ma := _ALT_NAME.match(line):
                index_names[int(ma.group(1))] = ma.group(2)
            continue
        if _TIE_CHARS & set(line):
            raise BallotFormatError(lineno, f"ties and grouped candidates are not supported: {line!r}")
        if mc := _COUNT_LINE.match(line):
            items = [s.strip() for s in mc.group(2).split(",")]
            try:
                idx = [int(s) for s in items]
            except ValueError:
                raise BallotFormatError(lineno, f"non-integer candidate index in {line!r}") from None
            counted.append((lineno, int(mc.group(1)), idx))
        else:
            names = [s.strip() for s in line.split(">")]
            if any(not s for s in names):
                raise BallotFormatError(lineno, f"empty alternative name in {line!r}")
            named.append((lineno, names))

    if named and counted:
        raise BallotFormatError(counted[0][0], "cannot mix named ballots with count lines")
    if not named and not counted:
        raise BallotFormatError(0, "no ballots found")

    votes: list[tuple[int, ...]] = []
    if named:
        alts = sorted({x for _, names in named for x in names})
        lookup = {x: i for i, x in enumerate(alts)}
        for lineno, names in named:
            if sorted(names) != alts:
                raise BallotFormatError(lineno, f"ballot {'>'.join(names)!r} does not rank every alternative exactly once")
            votes.append(tuple(lookup[x] for x in names))
        m = len(alts)
        labels = alts
    else:
        m = len(counted[0][2])
        for lineno, count, idx in counted:
            if sorted(idx) != list(range(1, m + 1)):
                raise BallotFormatError(lineno, f"expected a strict order over 1..{m}, got {idx}")
            votes.extend([tuple(i - 1 for i in idx)] * count)
        labels = [index_names.get(i + 1, str(i + 1)) for i in range(m)]

    if header is not None and header != (m, len(votes)):
        raise BallotFormatError(0, f"header says m={header[0]} n={header[1]}, ballots give m={m} n={len(votes)}")
    if m < 2:
        raise BallotFormatError(0, "need at least two alternatives")
    if not votes:
        raise BallotFormatError(0, "no ballots found")
    return Profile(tuple(votes), m), labels


def format_ballots(p: Profile, names: Sequence[str] | None = None, header: bool = True) -> str:
    names = list(names) if names is not None else default_names(p.m)
    lines = [f"# m={p.m} n={p.n}"] if header else []
    lines += [">".join(names[a] for a in vote) for vote in p.votes]
    return "\n".join(lines) + "\n"


def format_profile_inline(p: Profile, names: Sequence[str] | None = None) -> str:
    """Single-line form used inside JSON reports: ``a>b>c; c>b>a``."""
    names = list(names) if names is not None else default_names(p.m)
    return "; ".join(">".join(names[a] for a in vote) for vote in p.votes)
