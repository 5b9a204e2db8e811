"""Benchmark instances: formats, DFA compilers, builders, generators."""

import random

import pytest

from countsearch.alldiff import AllDifferent, SymmetricAllDifferent
from countsearch.bench import (
    GENERATORS,
    KINDS,
    Instance,
    ParseError,
    build_model,
    generate_kprostering,
    generate_marketsplit,
    generate_multiknap,
    generate_nonogram,
    generate_qwh,
    generate_rostering,
    generate_ttppv,
    infer_kind,
    load_instance,
    nonogram_clue_dfa,
    parse_instance,
    rostering_dfa,
    save_instance,
    ttppv_pattern_dfa,
    write_instance,
)
from countsearch.knapsack import Knapsack
from countsearch.heuristics import MaxSD, make_heuristic
from countsearch.regular import Regular, build_layered_graph
from countsearch.search import SAT, dfs

_GEN_ARGS = {
    "qwh": {"order": 5, "holes": 0.4},
    "magic": {"order": 3, "filled": 0.3},
    "nonogram": {"rows": 5, "cols": 5},
    "multiknap": {"n": 8, "m": 2},
    "marketsplit": {"m": 2},
    "rostering": {"employees": 3, "periods": 5, "preset": 0.3},
    "kprostering": {"employees": 2, "days": 6, "n_forbidden": 3},
    "ttppv": {"teams": 4},
}


# ----------------------------------------------------------------------
# formats
# ----------------------------------------------------------------------
@pytest.mark.parametrize("kind", KINDS)
def test_round_trip_is_byte_identical(kind, tmp_path):
    inst = GENERATORS[kind](seed=3, **_GEN_ARGS[kind])
    text = write_instance(inst)
    again = parse_instance(text, kind, inst.name)
    assert write_instance(again) == text
    assert again.payload == inst.payload
    path = tmp_path / "inst.txt"
    save_instance(inst, str(path))
    loaded = load_instance(str(path), kind)
    assert loaded.payload == inst.payload


def test_infer_kind_by_extension_and_tag():
    assert infer_kind("a/b/foo.qwh", "") == "qwh"
    assert infer_kind("foo.mknap", "") == "multiknap"
    assert infer_kind("foo.msplit", "") == "marketsplit"
    text = write_instance(generate_rostering(seed=1, employees=3, periods=4))
    assert infer_kind("foo.txt", text) == "rostering"
    with pytest.raises(ParseError):
        infer_kind("foo.dat", "3 3\n1 2 3\n")


def test_comments_and_blank_lines_ignored():
    text = "# header comment\n\n3  # order\n1 2 3\n2 3 1\n3 1 2\n"
    inst = parse_instance(text, "qwh")
    assert inst.payload["n"] == 3
    assert inst.payload["grid"][0] == [1, 2, 3]


def test_malformed_instances_rejected():
    with pytest.raises(ParseError):
        parse_instance("", "qwh")
    with pytest.raises(ParseError):
        parse_instance("2\n1 2\n", "qwh")  # missing a grid row
    with pytest.raises(ParseError):
        parse_instance("2\n1 x\n2 1\n", "qwh")  # non-integer entry
    with pytest.raises(ParseError):
        # clue cannot fit in the row
        parse_instance("1 2\n3\n1\n1\n", "nonogram")
    with pytest.raises(ValueError):
        Instance("mystery", "m", {})


def test_ttppv_validator_requires_antisymmetry():
    with pytest.raises(ParseError):
        Instance(
            "ttppv",
            "bad",
            {"n": 4, "venues": [[0] * 4 for _ in range(4)]},
        )


# ----------------------------------------------------------------------
# DFA compilers
# ----------------------------------------------------------------------
def test_nonogram_clue_placements():
    # blocks 2,1 in 5 cells: 11010, 11001, 01101 -> 3 placements
    dfa = nonogram_clue_dfa([2, 1])
    graph = build_layered_graph(dfa, [{0, 1}] * 5)
    assert graph.count == 3
    assert dfa.accepts([1, 1, 0, 1, 0])
    assert dfa.accepts([0, 1, 1, 0, 1])
    assert not dfa.accepts([1, 1, 1, 0, 1])
    assert not dfa.accepts([1, 0, 1, 0, 1])


def test_nonogram_empty_clue():
    dfa = nonogram_clue_dfa([0])
    assert dfa.accepts([0, 0, 0])
    assert not dfa.accepts([0, 1, 0])


def test_rostering_dfa_rules():
    dfa = rostering_dfa(3)
    assert dfa.accepts([1, 1, 2, 0, 3])  # adjacent moves, break, restart
    assert dfa.accepts([0, 0, 2, 3])  # may start with breaks
    assert not dfa.accepts([1, 3])  # tasks 1 and 3 are not adjacent
    assert not dfa.accepts([2, 0, 1])  # after a break from 2, task 1 barred


def test_ttppv_pattern_dfa_limits_runs():
    # team 0 plays all others at home: four home games in a row exceed
    # the three-consecutive limit
    n = 6
    venues = [[0] * n for _ in range(n)]
    for j in range(1, n):
        venues[0][j] = 1
        venues[j][0] = 0
    for i in range(1, n):
        for j in range(i + 1, n):
            venues[i][j] = 1
            venues[j][i] = 0
    dfa = ttppv_pattern_dfa(0, venues)
    assert dfa.accepts([2, 3, 4])  # three home games: allowed
    assert not dfa.accepts([2, 3, 4, 5])  # four in a row: barred


# ----------------------------------------------------------------------
# model builders
# ----------------------------------------------------------------------
def test_qwh_model_structure():
    inst = generate_qwh(order=4, holes=0.4, seed=1)
    model = build_model(inst)
    assert len(model.variables) == 16
    assert len(model.constraints) == 8
    assert all(isinstance(c, AllDifferent) for c in model.constraints)


def test_magic_model_structure():
    inst = Instance("magic", "m9", {"n": 9, "grid": [[0] * 9] * 9})
    model = build_model(inst)
    alldiffs = [c for c in model.constraints if isinstance(c, AllDifferent)]
    knaps = [c for c in model.constraints if isinstance(c, Knapsack)]
    assert len(alldiffs) == 1
    assert len(knaps) == 20  # 9 rows + 9 columns + 2 diagonals
    assert all(c.lower == c.upper == 369 for c in knaps)


def test_nonogram_model_structure():
    inst = generate_nonogram(rows=5, cols=4, seed=2)
    model = build_model(inst)
    assert len(model.variables) == 20
    assert len(model.constraints) == 9
    assert all(isinstance(c, Regular) for c in model.constraints)


def test_ttppv_model_structure():
    inst = generate_ttppv(teams=4, seed=2)
    model = build_model(inst)
    assert len(model.variables) == 4 * 3
    sym = [
        c for c in model.constraints if isinstance(c, SymmetricAllDifferent)
    ]
    assert len(sym) == 3  # one pairing constraint per round


# ----------------------------------------------------------------------
# generators produce solvable instances at desk scale
# ----------------------------------------------------------------------
@pytest.mark.parametrize(
    "kind", ["qwh", "magic", "nonogram", "multiknap", "rostering",
             "kprostering"]
)
def test_generated_instances_are_satisfiable(kind):
    inst = GENERATORS[kind](seed=5, **_GEN_ARGS[kind])
    assert inst.status == "sat"
    model = build_model(inst)
    stats = dfs(model, MaxSD(model), backtrack_limit=50_000)
    assert stats.status == SAT


def test_marketsplit_round_trips_and_builds():
    inst = generate_marketsplit(m=2, seed=4)
    assert inst.status is None  # satisfiability unknown by construction
    model = build_model(inst)
    assert len(model.variables) == 10
    assert len(model.constraints) == 2


def test_generators_are_seed_deterministic():
    for kind in KINDS:
        a = GENERATORS[kind](seed=9, **_GEN_ARGS[kind])
        b = GENERATORS[kind](seed=9, **_GEN_ARGS[kind])
        c = GENERATORS[kind](seed=10, **_GEN_ARGS[kind])
        assert a.payload == b.payload
        assert a.payload != c.payload
