"""Shared fixtures: the bundled reference map, synthetic map generators,
and discovery of the optional 2015 GEM data files."""

from __future__ import annotations

import io
import itertools
import os
from pathlib import Path

import numpy as np
import pytest

from gementropy import gem_io
from gementropy.cli import REFERENCE_MAP_LINES
from gementropy.gem_io import NO_MATCH_SENTINELS, Flag, GemEntry

CODE_CHARS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@pytest.fixture
def reference_entries():
    return gem_io.parse_gem_file(io.StringIO(REFERENCE_MAP_LINES), "<reference>")


@pytest.fixture
def reference_record(reference_entries):
    return gem_io.group_maps(reference_entries)[0]


def random_code(rng: np.random.Generator, max_len: int = 8) -> str:
    while True:
        length = int(rng.integers(1, max_len + 1))
        code = "".join(rng.choice(list(CODE_CHARS), size=length))
        if code not in NO_MATCH_SENTINELS:
            return code


def make_map_entries(
    rng: np.random.Generator,
    source: str,
    max_m: int = 20,
    max_scenarios: int = 3,
    max_lists: int = 3,
    max_list_size: int = 4,
    line_start: int = 1,
) -> list[GemEntry]:
    """Random entries of one map honoring all flag invariants; m <= max_m."""
    while True:
        m0 = int(rng.integers(0, 6))
        n_scenarios = int(rng.integers(0, max_scenarios + 1))
        shape = [
            [int(rng.integers(1, max_list_size + 1)) for _ in range(int(rng.integers(1, max_lists + 1)))]
            for _ in range(n_scenarios)
        ]
        m = m0 + sum(sum(lists) for lists in shape)
        if 1 <= m <= max_m:
            break
    entries = []
    for _ in range(m0):
        flag = Flag(bool(rng.integers(0, 2)), False, False, 0, 0)
        entries.append(GemEntry(source, random_code(rng), flag, 0))
    for s, lists in enumerate(shape, start=1):
        for c, size in enumerate(lists, start=1):
            for _ in range(size):
                flag = Flag(True, False, True, s, c)
                entries.append(GemEntry(source, random_code(rng), flag, 0))
    order = rng.permutation(len(entries))
    return [
        GemEntry(e.source, e.target, e.flag, line_start + i)
        for i, e in enumerate(entries[j] for j in order)
    ]


def make_map_record(rng: np.random.Generator, source: str = "SRC", **kwargs):
    return gem_io.group_maps(make_map_entries(rng, source, **kwargs))[0]


def brute_force_valid_representations(record) -> int:
    """Independent enumerator: list every stand-alone pick and every full
    selection across each scenario's choice lists."""
    picks = list(record.standalone_codes)
    for scenario in record.scenarios:
        picks.extend(itertools.product(*scenario))
    return len(picks)


# ---------------------------------------------------------------------------
# Optional 2015 GEM data files for the data-dependent reproduction tests.
# Place them in $GEMENTROPY_DATA_DIR (default: <repo>/data/gems).

GEM_FILE_CANDIDATES = {
    "forward_procedure": ("gem_i9pcs.txt",),
    "backward_procedure": ("gem_pcsi9.txt",),
    "forward_diagnosis": ("2015_I9gem.txt", "i9gem.txt", "gem_i9cm.txt"),
    "backward_diagnosis": ("2015_I10gem.txt", "i10gem.txt", "gem_i10cm.txt"),
}


def gem_data_dir() -> Path:
    default = Path(__file__).resolve().parent.parent / "data" / "gems"
    return Path(os.environ.get("GEMENTROPY_DATA_DIR", default))


def find_gem_file(kind: str) -> Path | None:
    directory = gem_data_dir()
    if not directory.is_dir():
        return None
    by_lower = {p.name.lower(): p for p in directory.iterdir()}
    for candidate in GEM_FILE_CANDIDATES[kind]:
        hit = by_lower.get(candidate.lower())
        if hit:
            return hit
    return None


def require_gem_file(kind: str) -> Path:
    path = find_gem_file(kind)
    if path is None:
        pytest.skip(
            f"2015 GEM file for {kind} not found; place "
            f"{GEM_FILE_CANDIDATES[kind][0]} in {gem_data_dir()} "
            "(freely downloadable from the CMS archive) to run this check"
        )
    return path
