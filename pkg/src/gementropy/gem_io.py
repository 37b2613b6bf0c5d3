"""Crosswalk (GEM) file ingestion.

Parses the three-column ``SOURCE TARGET FLAG5`` crosswalk format, the CSV
side tables (clinical class ranges, code descriptions, code frequencies),
groups entries into per-source map records, and builds the padded
character matrix that the entropy kernels consume.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyMapError, ParseError, StructuralError

# Code alphabet: digits, uppercase letters, plus one padding symbol that can
# never occur in a code. Symbol indices are stable: '0'-'9' -> 0-9,
# 'A'-'Z' -> 10-35, pad -> 36.
ALPHABET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"
PAD_CHAR = "*"
PAD_SYMBOL = len(ALPHABET)
N_SYMBOLS = len(ALPHABET) + 1

# Targets that mark "no match in the target system", regardless of flag.
NO_MATCH_SENTINELS = frozenset({"NODX", "NOPCS"})

UNCLASSIFIED = "unclassified"

_CODE_RE = re.compile(r"^[A-Z0-9]{1,8}$")

_CHAR_TO_SYMBOL = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(ALPHABET + PAD_CHAR):
    _CHAR_TO_SYMBOL[ord(_c)] = _i


@dataclass(frozen=True)
class Flag:
    """Decoded five-digit supplemental flag of one crosswalk entry."""

    approximate: bool
    no_map: bool
    combination: bool
    scenario: int
    choice_list: int


@dataclass(frozen=True)
class GemEntry:
    """One crosswalk line: a source code, a candidate target, and its flag."""

    source: str
    target: str
    flag: Flag
    line_number: int

    @property
    def is_no_match(self) -> bool:
        """True when this entry marks data loss (no target-system match)."""
        return self.flag.no_map or self.target in NO_MATCH_SENTINELS

    def to_line(self) -> str:
        f = self.flag
        digits = (
            f"{int(f.approximate)}{int(f.no_map)}{int(f.combination)}"
            f"{f.scenario}{f.choice_list}"
        )
        return f"{self.source} {self.target} {digits}"


@dataclass(frozen=True)
class MapRecord:
    """All entries of one source code, split into stand-alone codes and the
    scenario -> choice-list structure used to count valid representations."""

    source: str
    entries: tuple[GemEntry, ...]
    standalone_codes: tuple[str, ...]
    # scenarios[i][j] is the j-th choice list (tuple of codes) of scenario i+1
    scenarios: tuple[tuple[tuple[str, ...], ...], ...]
    m: int
    m0: int

    @property
    def is_excluded(self) -> bool:
        """True for no-match sources (m = 0), which cannot be scored."""
        return self.m == 0


@dataclass
class CodeMatrix:
    """Target codes of one map as an m x n matrix of symbol indices.

    Every row is one target code in file order (duplicates kept); n is the
    longest raw code length in the map and shorter codes are right-padded
    with the pad symbol, which counts as an ordinary alphabet.
    """

    codes: np.ndarray  # (m, n) uint8 symbol indices
    pad: str = PAD_CHAR

    def __post_init__(self):
        self.codes.setflags(write=False)

    @property
    def m(self) -> int:
        return self.codes.shape[0]

    @property
    def n(self) -> int:
        return self.codes.shape[1]

    def row_strings(self) -> list[str]:
        """Rows rendered back to padded text, mostly for debugging."""
        table = ALPHABET + PAD_CHAR
        return ["".join(table[s] for s in row) for row in self.codes]


@dataclass(frozen=True)
class ClassDef:
    """A clinical class: a label plus inclusive code-prefix ranges."""

    id: str
    label: str
    ranges: tuple[tuple[str, str], ...]


def parse_flag(text: str, filename=None, line=None) -> Flag:
    """Decode a five-digit flag string.

    Digits are, in order: approximate, no-map, combination, scenario number,
    choice-list number. The first three must be 0 or 1.
    """
    if len(text) != 5 or not text.isdigit():
        raise ParseError(
            f"flag must be exactly 5 digits, got {text!r}", filename, line
        )
    digits = [int(c) for c in text]
    for pos, name in ((0, "approximate"), (1, "no-map"), (2, "combination")):
        if digits[pos] > 1:
            raise StructuralError(
                f"flag digit {pos + 1} ({name}) must be 0 or 1, got {digits[pos]}",
                filename,
                line,
            )
    approximate, no_map, combination = bool(digits[0]), bool(digits[1]), bool(digits[2])
    scenario, choice_list = digits[3], digits[4]
    if no_map and combination:
        raise StructuralError(
            f"flag {text!r} sets both no-map and combination", filename, line
        )
    if not combination and (scenario != 0 or choice_list != 0):
        raise StructuralError(
            f"flag {text!r} has scenario/choice-list digits without the "
            "combination digit",
            filename,
            line,
        )
    if combination and (scenario == 0 or choice_list == 0):
        raise StructuralError(
            f"flag {text!r} sets combination but scenario or choice list is 0",
            filename,
            line,
        )
    return Flag(approximate, no_map, combination, scenario, choice_list)


def _validate_code(text: str, what: str, filename, line) -> str:
    code = text.upper()
    if not _CODE_RE.match(code):
        raise ParseError(
            f"{what} code {text!r} is not 1-8 characters of [A-Z0-9]",
            filename,
            line,
        )
    return code


def parse_gem_file(source, filename: str | None = None) -> list[GemEntry]:
    """Parse a crosswalk file into entries, preserving file order.

    ``source`` may be a path or an open text/binary stream. Lines hold three
    whitespace-separated fields: source code, target code, 5-digit flag.
    Blank lines are skipped; anything else malformed raises with file and
    line context.
    """
    close = False
    if isinstance(source, (str, Path)):
        filename = filename or str(source)
        stream = open(source, "r", encoding="utf-8")
        close = True
    elif isinstance(source, (bytes, bytearray)):
        stream = io.StringIO(source.decode("utf-8"))
    else:
        stream = source
    try:
        entries = []
        for line_number, raw in enumerate(stream, start=1):
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            fields = raw.split()
            if not fields:
                continue
            if len(fields) != 3:
                raise ParseError(
                    f"expected 3 fields (source target flag), got {len(fields)}",
                    filename,
                    line_number,
                )
            src = _validate_code(fields[0], "source", filename, line_number)
            tgt = _validate_code(fields[1], "target", filename, line_number)
            flag = parse_flag(fields[2], filename, line_number)
            if flag.no_map and tgt not in NO_MATCH_SENTINELS:
                raise StructuralError(
                    f"no-map flag with a regular target code {tgt!r}",
                    filename,
                    line_number,
                )
            if flag.combination and tgt in NO_MATCH_SENTINELS:
                # No-match sentinels cannot participate in combinations;
                # flagged rather than silently repaired.
                raise StructuralError(
                    f"no-match target {tgt!r} carries a combination flag",
                    filename,
                    line_number,
                )
            entries.append(GemEntry(src, tgt, flag, line_number))
        return entries
    finally:
        if close:
            stream.close()


def group_maps(entries: Iterable[GemEntry]) -> list[MapRecord]:
    """Group entries by source code into map records.

    Groups follow first-appearance order; entry order inside a group is
    preserved. Stand-alone entries (no combination flag) fill
    ``standalone_codes``; combination entries are bucketed by their
    (scenario, choice list) digits, which must number contiguously from 1.
    """
    groups: dict[str, list[GemEntry]] = {}
    for entry in entries:
        groups.setdefault(entry.source, []).append(entry)

    records = []
    for source, group in groups.items():
        no_match = [e for e in group if e.is_no_match]
        if no_match and len(no_match) != len(group):
            raise StructuralError(
                f"source {source} mixes no-match and regular entries",
                source=source,
            )
        if no_match:
            records.append(
                MapRecord(source, tuple(group), (), (), m=0, m0=0)
            )
            continue

        standalone = [e.target for e in group if not e.flag.combination]
        buckets: dict[tuple[int, int], list[str]] = {}
        for e in group:
            if e.flag.combination:
                key = (e.flag.scenario, e.flag.choice_list)
                buckets.setdefault(key, []).append(e.target)

        scenario_ids = sorted({s for s, _ in buckets})
        if scenario_ids and scenario_ids != list(range(1, len(scenario_ids) + 1)):
            raise StructuralError(
                f"source {source} has non-contiguous scenario numbers "
                f"{scenario_ids}",
                source=source,
            )
        scenarios = []
        for s in scenario_ids:
            list_ids = sorted({c for sc, c in buckets if sc == s})
            if list_ids != list(range(1, len(list_ids) + 1)):
                raise StructuralError(
                    f"source {source} scenario {s} has non-contiguous "
                    f"choice lists {list_ids}",
                    source=source,
                )
            scenarios.append(tuple(tuple(buckets[(s, c)]) for c in list_ids))

        m0 = len(standalone)
        m = m0 + sum(len(cl) for sc in scenarios for cl in sc)
        records.append(
            MapRecord(
                source,
                tuple(group),
                tuple(standalone),
                tuple(scenarios),
                m=m,
                m0=m0,
            )
        )
    return records


def encode_codes(codes: Sequence[str], width: int) -> np.ndarray:
    """Encode codes into a (len(codes), width) uint8 symbol matrix,
    right-padding shorter codes with the pad symbol."""
    joined = "".join(code.ljust(width, PAD_CHAR) for code in codes)
    raw = np.frombuffer(joined.encode("ascii"), dtype=np.uint8)
    return _CHAR_TO_SYMBOL[raw].reshape(len(codes), width)


def build_matrix(record: MapRecord) -> CodeMatrix:
    """Build the padded character matrix for one map.

    Rows are the map's target codes in file order (duplicates kept); the
    width is the longest raw code length in the map.
    """
    if record.m == 0:
        raise EmptyMapError(record.source)
    targets = [e.target for e in record.entries]
    width = max(len(t) for t in targets)
    return CodeMatrix(encode_codes(targets, width))


def _read_csv(source, filename, expected_header):
    close = False
    if isinstance(source, (str, Path)):
        filename = filename or str(source)
        stream = open(source, "r", encoding="utf-8", newline="")
        close = True
    elif isinstance(source, (bytes, bytearray)):
        stream = io.StringIO(source.decode("utf-8"))
    else:
        stream = source
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty, expected a header row", filename, 1)
        got = [h.strip().lower() for h in header]
        if got != list(expected_header):
            raise ParseError(
                f"expected header {','.join(expected_header)!r}, got "
                f"{','.join(header)!r}",
                filename,
                1,
            )
        rows = []
        for line_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected_header):
                raise ParseError(
                    f"expected {len(expected_header)} columns, got {len(row)}",
                    filename,
                    line_number,
                )
            rows.append((line_number, [cell.strip() for cell in row]))
        return filename, rows
    finally:
        if close:
            stream.close()


def _padded_bounds(low: str, high: str) -> tuple[str, str]:
    k = max(len(low), len(high))
    return low.ljust(k, "0"), high.ljust(k, "0")


def load_class_defs(source, filename: str | None = None) -> list[ClassDef]:
    """Load clinical class definitions from `low,high,label` CSV rows.

    Rows sharing a label merge into one class with several ranges. Ranges of
    different classes must not overlap (prefix-interval comparison after
    right-padding bounds with '0').
    """
    filename, rows = _read_csv(source, filename, ("low", "high", "label"))
    by_label: dict[str, list[tuple[str, str]]] = {}
    for line_number, (low, high, label) in rows:
        low = _validate_code(low, "range low", filename, line_number)
        high = _validate_code(high, "range high", filename, line_number)
        plow, phigh = _padded_bounds(low, high)
        if plow > phigh:
            raise StructuralError(
                f"range low {low!r} exceeds high {high!r} after padding",
                filename,
                line_number,
            )
        if not label:
            raise ParseError("class label is empty", filename, line_number)
        by_label.setdefault(label, []).append((low, high))

    defs = [
        ClassDef(
            id="+".join(f"{low}-{high}" for low, high in ranges),
            label=label,
            ranges=tuple(ranges),
        )
        for label, ranges in by_label.items()
    ]

    for i, a in enumerate(defs):
        for b in defs[i + 1 :]:
            for ra in a.ranges:
                for rb in b.ranges:
                    if _ranges_overlap(ra, rb):
                        raise StructuralError(
                            f"class {a.id!r} ({a.label}) overlaps class "
                            f"{b.id!r} ({b.label}) on ranges {ra} and {rb}"
                        )
    return defs


def _ranges_overlap(ra: tuple[str, str], rb: tuple[str, str]) -> bool:
    # A code matches a range via its first k characters, so two ranges admit
    # a common code iff the shorter range intersects the longer one's bounds
    # truncated to the shorter prefix length.
    la, ha = _padded_bounds(*ra)
    lb, hb = _padded_bounds(*rb)
    if len(la) > len(lb):
        la, ha, lb, hb = lb, hb, la, ha
    k = len(la)
    return la <= hb[:k] and lb[:k] <= ha


def assign_class(code: str, defs: Sequence[ClassDef]) -> str:
    """Return the id of the class whose range covers the code's leading
    prefix, or ``"unclassified"``.

    Bounds are right-padded with '0' to a common length k and compared
    lexicographically against the code's first k characters (themselves
    '0'-padded when the code is shorter).
    """
    code = code.upper()
    for cdef in defs:
        for low, high in cdef.ranges:
            plow, phigh = _padded_bounds(low, high)
            k = len(plow)
            prefix = code[:k].ljust(k, "0")
            if plow <= prefix <= phigh:
                return cdef.id
    return UNCLASSIFIED


def load_descriptions(source, filename: str | None = None) -> dict[str, str]:
    """Load a `code,description` CSV into a lookup table."""
    filename, rows = _read_csv(source, filename, ("code", "description"))
    table: dict[str, str] = {}
    for line_number, (code, description) in rows:
        code = _validate_code(code, "described", filename, line_number)
        if code in table:
            raise ParseError(f"duplicate code {code}", filename, line_number)
        table[code] = description
    return table


def load_frequencies(source, filename: str | None = None) -> dict[str, float]:
    """Load a `code,probability` CSV; every probability must lie in [0, 1]."""
    filename, rows = _read_csv(source, filename, ("code", "probability"))
    table: dict[str, float] = {}
    for line_number, (code, prob) in rows:
        code = _validate_code(code, "frequency", filename, line_number)
        if code in table:
            raise ParseError(f"duplicate code {code}", filename, line_number)
        try:
            p = float(prob)
        except ValueError:
            raise ParseError(f"probability {prob!r} is not a number", filename, line_number)
        if not 0.0 <= p <= 1.0:
            raise ParseError(
                f"probability {p} outside [0, 1]", filename, line_number
            )
        table[code] = p
    return table
