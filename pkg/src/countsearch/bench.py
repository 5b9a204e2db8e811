"""Benchmark problems: instances, file formats, generators, models.

Eight problem kinds are supported: quasigroup-with-holes (qwh), magic
square completion (magic), nonograms, multi-dimensional knapsack
(multiknap), market split (marketsplit), shift rostering (rostering),
cost-constrained rostering (kprostering) and the travelling tournament
problem with predefined venues (ttppv).

All file formats are line-oriented text; ``#`` starts a comment.  The
first five kinds are recognized by file extension, the last three by a
self-describing kind tag on the first line.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .alldiff import AllDifferent, SymmetricAllDifferent
from .engine import DOMAIN, Model
from .knapsack import Knapsack
from .regular import Automaton, Regular

KINDS = (
    "qwh",
    "magic",
    "nonogram",
    "multiknap",
    "marketsplit",
    "rostering",
    "kprostering",
    "ttppv",
)

_EXTENSIONS = {
    ".qwh": "qwh",
    ".magic": "magic",
    ".nonogram": "nonogram",
    ".mknap": "multiknap",
    ".msplit": "marketsplit",
}


@dataclass
class Instance:
    kind: str
    name: str
    payload: dict
    status: Optional[str] = None  # "sat" when satisfiable by construction

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        _VALIDATORS[self.kind](self.payload)


class ParseError(ValueError):
    """Malformed instance file."""


# ----------------------------------------------------------------------
# payload validation
# ----------------------------------------------------------------------
def _check_grid(grid, rows, cols, low, high, what):
    if len(grid) != rows:
        raise ParseError(f"{what}: expected {rows} rows, got {len(grid)}")
    for r, row in enumerate(grid):
        if len(row) != cols:
            raise ParseError(f"{what} row {r}: expected {cols} entries")
        for v in row:
            if not (low <= v <= high):
                raise ParseError(f"{what} row {r}: value {v} out of range")


def _validate_square(payload):
    n = payload["n"]
    _check_grid(payload["grid"], n, n, 0, n, "grid")


def _validate_magic(payload):
    n = payload["n"]
    _check_grid(payload["grid"], n, n, 0, n * n, "grid")
    filled = [v for row in payload["grid"] for v in row if v]
    if len(filled) != len(set(filled)):
        raise ParseError("magic square presets repeat a value")


def _validate_nonogram(payload):
    rows, cols = payload["rows"], payload["cols"]
    if len(payload["row_clues"]) != rows or len(payload["col_clues"]) != cols:
        raise ParseError("clue count does not match dimensions")
    for clue, limit in [(c, cols) for c in payload["row_clues"]] + [
        (c, rows) for c in payload["col_clues"]
    ]:
        need = sum(clue) + max(0, len(clue) - 1) if clue != [0] else 0
        if need > limit:
            raise ParseError(f"clue {clue} cannot fit in {limit} cells")


def _validate_multiknap(payload):
    n, m = payload["n"], payload["m"]
    if len(payload["objective"]) != n:
        raise ParseError("objective length mismatch")
    if len(payload["constraints"]) != m:
        raise ParseError("constraint count mismatch")
    for coeffs, cap in payload["constraints"]:
        if len(coeffs) != n:
            raise ParseError("constraint coefficient length mismatch")
        if cap < 0:
            raise ParseError("negative capacity")


def _validate_marketsplit(payload):
    m, n = payload["m"], payload["n"]
    if len(payload["rows"]) != m:
        raise ParseError("row count mismatch")
    for coeffs, rhs in payload["rows"]:
        if len(coeffs) != n:
            raise ParseError("row length mismatch")


def _validate_rostering(payload):
    e, p, t = payload["employees"], payload["periods"], payload["tasks"]
    if t < 1:
        raise ParseError("need at least one task")
    _check_grid(payload["grid"], e, p, -1, t, "grid")


def _validate_kprostering(payload):
    m, n, s = payload["employees"], payload["days"], payload["shifts"]
    _check_grid(payload["costs"], m, n, 0, 10 ** 9, "costs")
    if len(payload["targets"]) != m:
        raise ParseError("target count mismatch")
    for e, d, shift in payload["forbidden"]:
        if not (0 <= e < m and 0 <= d < n and 0 <= shift < s):
            raise ParseError(f"forbidden triple ({e},{d},{shift}) out of range")


def _validate_ttppv(payload):
    n = payload["n"]
    if n % 2 or n < 4:
        raise ParseError("team count must be even and at least 4")
    venues = payload["venues"]
    _check_grid(venues, n, n, 0, 1, "venues")
    for i in range(n):
        for j in range(n):
            if i != j and venues[i][j] == venues[j][i]:
                raise ParseError("venue table must be antisymmetric")


_VALIDATORS = {
    "qwh": _validate_square,
    "magic": _validate_magic,
    "nonogram": _validate_nonogram,
    "multiknap": _validate_multiknap,
    "marketsplit": _validate_marketsplit,
    "rostering": _validate_rostering,
    "kprostering": _validate_kprostering,
    "ttppv": _validate_ttppv,
}


# ----------------------------------------------------------------------
# parsing / writing
# ----------------------------------------------------------------------
def _data_lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _ints(line: str, where: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def infer_kind(path: str, text: str) -> str:
    for ext, kind in _EXTENSIONS.items():
        if path.endswith(ext):
            return kind
    first = _data_lines(text)
    if first:
        tag = first[0].split()[0]
        if tag in ("rostering", "kprostering", "ttppv"):
            return tag
    raise ParseError(
        f"cannot infer instance kind for {path!r}; use a known extension "
        "or a tagged first line"
    )


def parse_instance(text: str, kind: str, name: str = "") -> Instance:
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty instance")
    try:
        parser = _PARSERS[kind]
    except KeyError:
        raise ParseError(f"unknown kind {kind!r}") from None
    return parser(lines, name or kind)


def load_instance(path: str, kind: Optional[str] = None) -> Instance:
    with open(path) as fh:
        text = fh.read()
    kind = kind or infer_kind(path, text)
    import os

    return parse_instance(text, kind, os.path.basename(path))


def _parse_square(kind):
    def parse(lines: list[str], name: str) -> Instance:
        n = _ints(lines[0], "line 1")[0]
        if len(lines) < 1 + n:
            raise ParseError(f"expected {n} grid rows")
        grid = [_ints(lines[1 + i], f"row {i + 1}") for i in range(n)]
        return Instance(kind, name, {"n": n, "grid": grid})

    return parse


def _parse_nonogram(lines: list[str], name: str) -> Instance:
    rows, cols = _ints(lines[0], "line 1")[:2]
    if len(lines) < 1 + rows + cols:
        raise ParseError(f"expected {rows}+{cols} clue lines")
    row_clues = [_ints(lines[1 + i], f"row clue {i}") for i in range(rows)]
    col_clues = [
        _ints(lines[1 + rows + j], f"col clue {j}") for j in range(cols)
    ]
    payload = {
        "rows": rows,
        "cols": cols,
        "row_clues": [c or [0] for c in row_clues],
        "col_clues": [c or [0] for c in col_clues],
    }
    return Instance("nonogram", name, payload)


def _parse_multiknap(lines: list[str], name: str) -> Instance:
    n, m, optimum = _ints(lines[0], "line 1")[:3]
    objective = _ints(lines[1], "objective")
    constraints = []
    for i in range(m):
        row = _ints(lines[2 + i], f"constraint {i}")
        constraints.append((row[:-1], row[-1]))
    payload = {
        "n": n,
        "m": m,
        "optimum": optimum,
        "objective": objective,
        "constraints": constraints,
    }
    return Instance("multiknap", name, payload)


def _parse_marketsplit(lines: list[str], name: str) -> Instance:
    m, n = _ints(lines[0], "line 1")[:2]
    rows = []
    for i in range(m):
        row = _ints(lines[1 + i], f"row {i}")
        rows.append((row[:-1], row[-1]))
    return Instance("marketsplit", name, {"m": m, "n": n, "rows": rows})


def _parse_rostering(lines: list[str], name: str) -> Instance:
    head = lines[0].split()
    e, p, t = int(head[1]), int(head[2]), int(head[3])
    grid = [_ints(lines[1 + i], f"row {i}") for i in range(e)]
    payload = {"employees": e, "periods": p, "tasks": t, "grid": grid}
    return Instance("rostering", name, payload)


def _parse_kprostering(lines: list[str], name: str) -> Instance:
    head = lines[0].split()
    m, n, s = int(head[1]), int(head[2]), int(head[3])
    costs = [_ints(lines[1 + i], f"costs {i}") for i in range(m)]
    targets = _ints(lines[1 + m], "targets")
    forbidden = [tuple(_ints(l, "forbidden")) for l in lines[2 + m :]]
    payload = {
        "employees": m,
        "days": n,
        "shifts": s,
        "costs": costs,
        "targets": targets,
        "forbidden": forbidden,
    }
    return Instance("kprostering", name, payload)


def _parse_ttppv(lines: list[str], name: str) -> Instance:
    n = int(lines[0].split()[1])
    venues = [_ints(lines[1 + i], f"venues {i}") for i in range(n)]
    return Instance("ttppv", name, {"n": n, "venues": venues})


_PARSERS = {
    "qwh": _parse_square("qwh"),
    "magic": _parse_square("magic"),
    "nonogram": _parse_nonogram,
    "multiknap": _parse_multiknap,
    "marketsplit": _parse_marketsplit,
    "rostering": _parse_rostering,
    "kprostering": _parse_kprostering,
    "ttppv": _parse_ttppv,
}


def write_instance(instance: Instance) -> str:
    p = instance.payload
    lines: list[str] = []
    if instance.kind in ("qwh", "magic"):
        lines.append(str(p["n"]))
        lines.extend(" ".join(map(str, row)) for row in p["grid"])
    elif instance.kind == "nonogram":
        lines.append(f"{p['rows']} {p['cols']}")
        lines.extend(" ".join(map(str, c)) for c in p["row_clues"])
        lines.extend(" ".join(map(str, c)) for c in p["col_clues"])
    elif instance.kind == "multiknap":
        lines.append(f"{p['n']} {p['m']} {p['optimum']}")
        lines.append(" ".join(map(str, p["objective"])))
        for coeffs, cap in p["constraints"]:
            lines.append(" ".join(map(str, list(coeffs) + [cap])))
    elif instance.kind == "marketsplit":
        lines.append(f"{p['m']} {p['n']}")
        for coeffs, rhs in p["rows"]:
            lines.append(" ".join(map(str, list(coeffs) + [rhs])))
    elif instance.kind == "rostering":
        lines.append(
            f"rostering {p['employees']} {p['periods']} {p['tasks']}"
        )
        lines.extend(" ".join(map(str, row)) for row in p["grid"])
    elif instance.kind == "kprostering":
        lines.append(
            f"kprostering {p['employees']} {p['days']} {p['shifts']}"
        )
        lines.extend(" ".join(map(str, row)) for row in p["costs"])
        lines.append(" ".join(map(str, p["targets"])))
        lines.extend(" ".join(map(str, t)) for t in p["forbidden"])
    elif instance.kind == "ttppv":
        lines.append(f"ttppv {p['n']}")
        lines.extend(" ".join(map(str, row)) for row in p["venues"])
    return "\n".join(lines) + "\n"


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(write_instance(instance))


# ----------------------------------------------------------------------
# DFA compilers
# ----------------------------------------------------------------------
def nonogram_clue_dfa(clue: Sequence[int]) -> Automaton:
    """DFA over {0,1} accepting exactly the placements of the clue's
    blocks (run lengths in order, separated by at least one blank)."""
    blocks = [b for b in clue if b > 0]
    if not blocks:
        trans = {("z", 0): "z"}
        return Automaton(trans, "z", ["z"])
    trans: dict[tuple[object, int], object] = {}
    start = ("gap", 0)
    trans[(start, 0)] = start
    trans[(start, 1)] = ("blk", 0, 1)
    last = len(blocks) - 1
    for j, length in enumerate(blocks):
        for i in range(1, length + 1):
            state = ("blk", j, i)
            if i < length:
                trans[(state, 1)] = ("blk", j, i + 1)
            else:
                if j == last:
                    trans[(state, 0)] = ("done",)
                else:
                    trans[(state, 0)] = ("gap", j + 1)
        if j > 0:
            gap = ("gap", j)
            trans[(gap, 0)] = gap
            trans[(gap, 1)] = ("blk", j, 1)
    trans[(("done",), 0)] = ("done",)
    accepting = [("blk", last, blocks[last]), ("done",)]
    return Automaton(trans, start, accepting)


BREAK = 0


def rostering_dfa(n_tasks: int) -> Automaton:
    """Rostering rules over symbols 0 (break) and 1..n_tasks.

    Consecutive periods must carry equal or adjacent task numbers, a
    break may follow any task, and immediately after a break run the
    task preceding the break's predecessor task is forbidden.
    """
    trans: dict[tuple[object, int], object] = {}
    start = ("start",)
    trans[(start, BREAK)] = ("brk", 0)
    for a in range(1, n_tasks + 1):
        trans[(start, a)] = ("task", a)
        trans[(("task", a), BREAK)] = ("brk", a)
        for b in range(1, n_tasks + 1):
            if b == a or abs(b - a) == 1:
                trans[(("task", a), b)] = ("task", b)
    for t in range(0, n_tasks + 1):
        brk = ("brk", t)
        trans[(brk, BREAK)] = brk
        for b in range(1, n_tasks + 1):
            if t > 0 and b == t - 1:
                continue
            trans[(brk, b)] = ("task", b)
    states = {start, ("brk", 0)}
    for (q, _), q2 in trans.items():
        states.add(q)
        states.add(q2)
    return Automaton(trans, start, list(states))


def ttppv_pattern_dfa(
    team: int, venues: Sequence[Sequence[int]], max_run: int = 3
) -> Automaton:
    """DFA over opponent ids forbidding more than ``max_run`` consecutive
    home (or away) rounds for ``team`` under the predefined venues."""
    n = len(venues)
    opponents = [o for o in range(n) if o != team]
    # symbols are 1-based team numbers, matching the model variables
    trans: dict[tuple[object, int], object] = {}
    start = ("start",)
    states = {start}
    for o in opponents:
        home = venues[team][o]
        trans[(start, o + 1)] = (home, 1)
        states.add((home, 1))
    for home in (0, 1):
        for run in range(1, max_run + 1):
            state = (home, run)
            states.add(state)
            for o in opponents:
                v = venues[team][o]
                if v == home:
                    if run < max_run:
                        trans[(state, o + 1)] = (home, run + 1)
                else:
                    trans[(state, o + 1)] = (v, 1)
    return Automaton(trans, start, list(states))


# ----------------------------------------------------------------------
# model builders
# ----------------------------------------------------------------------
def build_model(instance: Instance) -> Model:
    return _BUILDERS[instance.kind](instance.payload)


def _build_qwh(payload: dict) -> Model:
    n, grid = payload["n"], payload["grid"]
    m = Model()
    cells = [
        [
            m.new_variable(
                {grid[r][c]} if grid[r][c] else range(1, n + 1), f"x{r}_{c}"
            )
            for c in range(n)
        ]
        for r in range(n)
    ]
    for r in range(n):
        m.add(AllDifferent(cells[r]))
    for c in range(n):
        m.add(AllDifferent([cells[r][c] for r in range(n)]))
    return m


def _build_magic(payload: dict) -> Model:
    n, grid = payload["n"], payload["grid"]
    target = n * (n * n + 1) // 2
    m = Model()
    cells = [
        [
            m.new_variable(
                {grid[r][c]} if grid[r][c] else range(1, n * n + 1),
                f"x{r}_{c}",
            )
            for c in range(n)
        ]
        for r in range(n)
    ]
    flat = [v for row in cells for v in row]
    m.add(AllDifferent(flat))
    ones = [1] * n
    for r in range(n):
        m.add(Knapsack(cells[r], ones, target, target))
    for c in range(n):
        m.add(Knapsack([cells[r][c] for r in range(n)], ones, target, target))
    m.add(Knapsack([cells[i][i] for i in range(n)], ones, target, target))
    m.add(
        Knapsack(
            [cells[i][n - 1 - i] for i in range(n)], ones, target, target
        )
    )
    return m


def _build_nonogram(payload: dict) -> Model:
    rows, cols = payload["rows"], payload["cols"]
    m = Model()
    cells = [
        [m.new_variable({0, 1}, f"x{r}_{c}") for c in range(cols)]
        for r in range(rows)
    ]
    for r, clue in enumerate(payload["row_clues"]):
        m.add(Regular(cells[r], nonogram_clue_dfa(clue)))
    for c, clue in enumerate(payload["col_clues"]):
        m.add(Regular([cells[r][c] for r in range(rows)], nonogram_clue_dfa(clue)))
    return m


def _build_multiknap(payload: dict) -> Model:
    n = payload["n"]
    m = Model()
    xs = [m.new_variable({0, 1}, f"x{j}") for j in range(n)]
    opt = payload["optimum"]
    m.add(Knapsack(xs, payload["objective"], opt, opt))
    for coeffs, cap in payload["constraints"]:
        m.add(Knapsack(xs, coeffs, 0, cap))
    return m


def _build_marketsplit(payload: dict) -> Model:
    n = payload["n"]
    m = Model()
    xs = [m.new_variable({0, 1}, f"x{j}") for j in range(n)]
    for coeffs, rhs in payload["rows"]:
        m.add(Knapsack(xs, coeffs, rhs, rhs))
    return m


def _build_rostering(payload: dict) -> Model:
    e, p, t = payload["employees"], payload["periods"], payload["tasks"]
    grid = payload["grid"]
    m = Model()
    values = set(range(0, t + 1))  # 0 = break
    vars_ = [
        [
            m.new_variable(
                {grid[i][j]} if grid[i][j] >= 0 else values, f"e{i}_p{j}"
            )
            for j in range(p)
        ]
        for i in range(e)
    ]
    dfa = rostering_dfa(t)
    for i in range(e):
        m.add(Regular(vars_[i], dfa))
    for j in range(p):
        m.add(AllDifferent([vars_[i][j] for i in range(e)]))
    return m


def _build_kprostering(payload: dict) -> Model:
    emp, days, shifts = payload["employees"], payload["days"], payload["shifts"]
    forbidden = {(e, d): set() for e in range(emp) for d in range(days)}
    for e, d, s in payload["forbidden"]:
        forbidden[(e, d)].add(s)
    m = Model()
    for e in range(emp):
        xs = []
        for d in range(days):
            dom = set(range(shifts)) - forbidden[(e, d)]
            xs.append(m.new_variable(dom, f"e{e}_d{d}"))
        target = payload["targets"][e]
        m.add(Knapsack(xs, payload["costs"][e], target, target))
    return m


def _build_ttppv(payload: dict) -> Model:
    n = payload["n"]
    venues = payload["venues"]
    rounds = n - 1
    m = Model()
    opp = [
        [
            m.new_variable(
                [o + 1 for o in range(n) if o != t], f"t{t}_r{r}"
            )
            for r in range(rounds)
        ]
        for t in range(n)
    ]
    for t in range(n):
        m.add(AllDifferent(opp[t]))
        m.add(Regular(opp[t], ttppv_pattern_dfa(t, venues)))
    for r in range(rounds):
        # scope position i stands for team i+1 in the pairing constraint
        m.add(SymmetricAllDifferent([opp[t][r] for t in range(n)]))
    return m


_BUILDERS = {
    "qwh": _build_qwh,
    "magic": _build_magic,
    "nonogram": _build_nonogram,
    "multiknap": _build_multiknap,
    "marketsplit": _build_marketsplit,
    "rostering": _build_rostering,
    "kprostering": _build_kprostering,
    "ttppv": _build_ttppv,
}


# ----------------------------------------------------------------------
# generators
# ----------------------------------------------------------------------
def _random_latin_square(n: int, rng: random.Random) -> list[list[int]]:
    base = [[(r + c) % n + 1 for c in range(n)] for r in range(n)]
    rows = list(range(n))
    cols = list(range(n))
    symbols = list(range(1, n + 1))
    rng.shuffle(rows)
    rng.shuffle(cols)
    rng.shuffle(symbols)
    return [
        [symbols[base[r][c] - 1] for c in cols] for r in rows
    ]


def generate_qwh(order: int, holes: float = 0.42, seed: int = 0) -> Instance:
    rng = random.Random(seed)
    grid = _random_latin_square(order, rng)
    n_holes = int(holes * order * order)
    positions = [(r, c) for r in range(order) for c in range(order)]
    rng.shuffle(positions)
    for r, c in positions[:n_holes]:
        grid[r][c] = 0
    return Instance(
        "qwh",
        f"qwh-{order}-s{seed}",
        {"n": order, "grid": grid},
        status="sat",
    )


def _magic_square(n: int) -> list[list[int]]:
    if n % 2 == 1:
        # Siamese method
        grid = [[0] * n for _ in range(n)]
        r, c = 0, n // 2
        for k in range(1, n * n + 1):
            grid[r][c] = k
            r2, c2 = (r - 1) % n, (c + 1) % n
            if grid[r2][c2]:
                r2, c2 = (r + 1) % n, c
            r, c = r2, c2
        return grid
    if n % 4 == 0:
        grid = [[r * n + c + 1 for c in range(n)] for r in range(n)]
        for r in range(n):
            for c in range(n):
                if (r % 4 in (0, 3)) == (c % 4 in (0, 3)):
                    grid[r][c] = n * n + 1 - grid[r][c]
        return grid
    raise ValueError("singly even magic square orders are not supported")


def generate_magic(
    order: int, filled: float = 0.10, seed: int = 0
) -> Instance:
    rng = random.Random(seed)
    full = _magic_square(order)
    grid = [[0] * order for _ in range(order)]
    positions = [(r, c) for r in range(order) for c in range(order)]
    rng.shuffle(positions)
    keep = int(filled * order * order)
    for r, c in positions[:keep]:
        grid[r][c] = full[r][c]
    return Instance(
        "magic",
        f"magic-{order}-s{seed}",
        {"n": order, "grid": grid},
        status="sat",
    )


def _clues_of(cells: Sequence[int]) -> list[int]:
    clue = []
    run = 0
    for v in cells:
        if v:
            run += 1
        elif run:
            clue.append(run)
            run = 0
    if run:
        clue.append(run)
    return clue or [0]


def generate_nonogram(
    rows: int, cols: int, density: float = 0.5, seed: int = 0
) -> Instance:
    rng = random.Random(seed)
    pic = [
        [1 if rng.random() < density else 0 for _ in range(cols)]
        for _ in range(rows)
    ]
    payload = {
        "rows": rows,
        "cols": cols,
        "row_clues": [_clues_of(row) for row in pic],
        "col_clues": [
            _clues_of([pic[r][c] for r in range(rows)]) for c in range(cols)
        ],
    }
    return Instance(
        "nonogram", f"nonogram-{rows}x{cols}-s{seed}", payload, status="sat"
    )


def generate_multiknap(
    n: int = 20, m: int = 3, seed: int = 0
) -> Instance:
    rng = random.Random(seed)
    objective = [rng.randrange(1, 50) for _ in range(n)]
    witness = [rng.randrange(2) for _ in range(n)]
    constraints = []
    for _ in range(m):
        coeffs = [rng.randrange(1, 30) for _ in range(n)]
        used = sum(c * x for c, x in zip(coeffs, witness))
        constraints.append((coeffs, used + rng.randrange(0, 20)))
    payload = {
        "n": n,
        "m": m,
        "optimum": sum(c * x for c, x in zip(objective, witness)),
        "objective": objective,
        "constraints": constraints,
    }
    return Instance(
        "multiknap", f"multiknap-{n}x{m}-s{seed}", payload, status="sat"
    )


def generate_marketsplit(m: int = 4, seed: int = 0) -> Instance:
    rng = random.Random(seed)
    n = 10 * (m - 1)
    rows = []
    for _ in range(m):
        coeffs = [rng.randrange(0, 100) for _ in range(n)]
        rows.append((coeffs, sum(coeffs) // 2))
    return Instance(
        "marketsplit", f"marketsplit-{m}-s{seed}", {"m": m, "n": n, "rows": rows}
    )


def generate_rostering(
    employees: int = 4,
    periods: int = 8,
    tasks: Optional[int] = None,
    preset: float = 0.05,
    seed: int = 0,
) -> Instance:
    rng = random.Random(seed)
    tasks = tasks if tasks is not None else employees + 1
    if tasks < employees:
        raise ValueError("need at least as many tasks as employees")
    # constant-task rows form a valid, column-distinct schedule
    schedule = [[e + 1] * periods for e in range(employees)]
    grid = [[-1] * periods for _ in range(employees)]
    cells = [(e, p) for e in range(employees) for p in range(periods)]
    rng.shuffle(cells)
    for e, p in cells[: int(preset * employees * periods)]:
        grid[e][p] = schedule[e][p]
    payload = {
        "employees": employees,
        "periods": periods,
        "tasks": tasks,
        "grid": grid,
    }
    return Instance(
        "rostering",
        f"rostering-{employees}x{periods}-s{seed}",
        payload,
        status="sat",
    )


def generate_kprostering(
    employees: int = 4,
    days: int = 25,
    shifts: int = 3,
    n_forbidden: int = 10,
    seed: int = 0,
) -> Instance:
    rng = random.Random(seed)
    costs = [
        [rng.randrange(1, 10) for _ in range(days)] for _ in range(employees)
    ]
    witness = [
        [rng.randrange(shifts) for _ in range(days)] for _ in range(employees)
    ]
    targets = [
        sum(costs[e][d] * witness[e][d] for d in range(days))
        for e in range(employees)
    ]
    forbidden = []
    seen = set()
    while len(forbidden) < n_forbidden:
        e = rng.randrange(employees)
        d = rng.randrange(days)
        s = rng.randrange(shifts)
        if s == witness[e][d] or (e, d, s) in seen:
            continue
        seen.add((e, d, s))
        forbidden.append((e, d, s))
    payload = {
        "employees": employees,
        "days": days,
        "shifts": shifts,
        "costs": costs,
        "targets": targets,
        "forbidden": sorted(forbidden),
    }
    return Instance(
        "kprostering",
        f"kprostering-{employees}x{days}-s{seed}",
        payload,
        status="sat",
    )


def generate_ttppv(teams: int = 4, seed: int = 0) -> Instance:
    rng = random.Random(seed)
    venues = [[0] * teams for _ in range(teams)]
    for i in range(teams):
        for j in range(i + 1, teams):
            home = rng.randrange(2)
            venues[i][j] = home
            venues[j][i] = 1 - home
    return Instance(
        "ttppv", f"ttppv-{teams}-s{seed}", {"n": teams, "venues": venues}
    )


GENERATORS = {
    "qwh": generate_qwh,
    "magic": generate_magic,
    "nonogram": generate_nonogram,
    "multiknap": generate_multiknap,
    "marketsplit": generate_marketsplit,
    "rostering": generate_rostering,
    "kprostering": generate_kprostering,
    "ttppv": generate_ttppv,
}
