"""Kill matrices and failure observations.

A kill matrix is a mutants x tests boolean grid recording, for every
mutant generated on a reference version of a program, which tests detect
(kill) it.  It is the sole input to every inference model in this
package.

Polarity convention: an entry of True/1 means the test *kills* the
mutant, i.e. the test fails when executed against the mutated program.
A mutant's "0-1 vector" therefore reads 1 = failing test.  Query vectors
built from live failures use the same polarity (see
:mod:`mutloc.classifiers`).

File formats
------------
CSV: header ``mutant_id,method,operator,description,t:<name1>,...`` with
one row per mutant and kill cells that are exactly ``0`` or ``1``.
UTF-8, ``\\n`` line endings.  JSON mirrors the same fields: a ``tests``
list plus a ``mutants`` list whose entries carry ``kills`` arrays of
0/1.  Failure observations are JSON objects
``{"failing": [...], "passing": [...]}`` where ``passing`` is optional.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyStratum, FormatError, InvalidObservation, NotFound

# Operator tags the built-in mutation engine can emit; matrices imported
# from external tools use "imported".
OPERATOR_TAGS = ("AOR", "ROR", "LOR", "SOR", "COR", "ORU", "LVR", "STD")
IMPORTED = "imported"

_CSV_FIXED_COLUMNS = ("mutant_id", "method", "operator", "description")
_TEST_COLUMN_PREFIX = "t:"


@dataclass(frozen=True)
class MutantRecord:
    """One mutant: a unique id, the method it lives in, and how it was made.

    ``operator`` is one of :data:`OPERATOR_TAGS` or ``"imported"``;
    ``description`` is free text, conventionally ``"original ↦ replacement"``.
    """

    id: str
    method: str
    operator: str
    description: str = ""


class KillMatrix:
    """Immutable mutants x tests kill grid with mutant -> method locations.

    Construction validates shape and id uniqueness; afterwards the object
    is read-only and safe to share across concurrent rankers.
    """

    def __init__(self, tests, mutants, kills):
        self.tests: tuple[str, ...] = tuple(tests)
        self.mutants: tuple[MutantRecord, ...] = tuple(mutants)
        grid = np.array(kills, dtype=bool).reshape(len(self.mutants), len(self.tests))
        grid.setflags(write=False)
        self.kills: np.ndarray = grid

        for name in self.tests:
            if not name:
                raise ValueError("test names must be non-empty")
        if len(set(self.tests)) != len(self.tests):
            raise ValueError("duplicate test names")
        ids = [m.id for m in self.mutants]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate mutant ids")
        for m in self.mutants:
            if not m.id or not m.method:
                raise ValueError(f"mutant {m.id!r} has an empty id or method")

        self._test_col = {name: j for j, name in enumerate(self.tests)}
        self._mutant_row = {m.id: i for i, m in enumerate(self.mutants)}
        # Method universe in first-appearance order; every scorer ranks
        # exactly these methods.
        seen: dict[str, list[int]] = {}
        for i, m in enumerate(self.mutants):
            seen.setdefault(m.method, []).append(i)
        self._method_rows = {e: np.array(rows, dtype=int) for e, rows in seen.items()}
        self.methods: tuple[str, ...] = tuple(seen)

    # -- basic shape -----------------------------------------------------

    @property
    def n_mutants(self) -> int:
        return len(self.mutants)

    @property
    def n_tests(self) -> int:
        return len(self.tests)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KillMatrix):
            return NotImplemented
        return (
            self.tests == other.tests
            and self.mutants == other.mutants
            and np.array_equal(self.kills, other.kills)
        )

    def __repr__(self) -> str:
        return (
            f"KillMatrix({self.n_mutants} mutants x {self.n_tests} tests, "
            f"{len(self.methods)} methods)"
        )

    # -- queries ----------------------------------------------------------

    def row_of(self, mutant) -> int:
        """Row index of a mutant (record or id). Unknown id -> NotFound."""
        mutant_id = mutant.id if isinstance(mutant, MutantRecord) else mutant
        try:
            return self._mutant_row[mutant_id]
        except KeyError:
            raise NotFound(f"unknown mutant id {mutant_id!r}") from None

    def column_of(self, test: str) -> int:
        """Column index of a test name. Unknown name -> NotFound."""
        try:
            return self._test_col[test]
        except KeyError:
            raise NotFound(f"unknown test {test!r}") from None

    def kill_set(self, mutant) -> frozenset[str]:
        """Tests that kill the given mutant (record or id)."""
        row = self.kills[self.row_of(mutant)]
        return frozenset(self.tests[j] for j in np.flatnonzero(row))

    def mutants_of(self, method: str) -> list[MutantRecord]:
        """All mutants located on ``method`` in matrix order.

        Unknown methods yield an empty list rather than an error so that
        rankers can score every method of a universe uniformly; callers
        that care can consult :attr:`methods`.
        """
        rows = self._method_rows.get(method)
        if rows is None:
            return []
        return [self.mutants[i] for i in rows]

    def method_rows(self, method: str) -> np.ndarray:
        """Row indices of a method's mutants (empty array if none)."""
        return self._method_rows.get(method, np.empty(0, dtype=int))

    def fail_given_mutated(self, method: str, test: str) -> float:
        """Fraction of the method's mutants killed by ``test``.

        Estimates the probability that ``test`` fails when ``method`` is
        mutated, directly from the kill grid.
        """
        rows = self._method_rows.get(method)
        if rows is None or len(rows) == 0:
            raise EmptyStratum(f"method {method!r} has no mutants")
        col = self.column_of(test)
        return float(self.kills[rows, col].sum()) / len(rows)

    # -- derived matrices ---------------------------------------------------

    def restrict(self, tests) -> "KillMatrix":
        """Same mutants, columns reduced and reordered to ``tests``."""
        cols = [self.column_of(t) for t in tests]
        return KillMatrix(tests, self.mutants, self.kills[:, cols])

    def without_mutant(self, mutant) -> "KillMatrix":
        """Copy of the matrix with one mutant's row removed."""
        row = self.row_of(mutant)
        keep = [i for i in range(self.n_mutants) if i != row]
        return KillMatrix(self.tests, [self.mutants[i] for i in keep], self.kills[keep])


# -- module-level operation aliases ------------------------------------------

def kill_set(matrix: KillMatrix, mutant) -> frozenset[str]:
    return matrix.kill_set(mutant)


def mutants_of(matrix: KillMatrix, method: str) -> list[MutantRecord]:
    return matrix.mutants_of(method)


def fail_given_mutated(matrix: KillMatrix, method: str, test: str) -> float:
    return matrix.fail_given_mutated(method, test)


def restrict(matrix: KillMatrix, tests) -> KillMatrix:
    return matrix.restrict(tests)


# -- failure observations -----------------------------------------------------


class FailureObservation:
    """The observed failure symptom: failing tests, optionally passing ones.

    ``passing=None`` means the passing side was not recorded (only F-scope
    models apply); an explicit empty set is a recorded, empty passing side.
    """

    def __init__(self, failing, passing=None):
        self.failing: frozenset[str] = frozenset(failing)
        self.passing: frozenset[str] | None = (
            None if passing is None else frozenset(passing)
        )
        if not self.failing:
            raise InvalidObservation("the failing set must be non-empty")
        if self.passing is not None and self.failing & self.passing:
            overlap = sorted(self.failing & self.passing)
            raise InvalidObservation(f"tests both failing and passing: {overlap}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, FailureObservation):
            return NotImplemented
        return self.failing == other.failing and self.passing == other.passing

    def __repr__(self) -> str:
        return f"FailureObservation(failing={sorted(self.failing)}, passing={None if self.passing is None else sorted(self.passing)})"


def load_observation(path) -> FailureObservation:
    """Read a ``{"failing": [...], "passing": [...]}`` JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict) or "failing" not in doc:
        raise FormatError('observation JSON must be an object with a "failing" list')
    failing = doc["failing"]
    passing = doc.get("passing")
    if not isinstance(failing, list) or not all(isinstance(t, str) for t in failing):
        raise FormatError('"failing" must be a list of test names')
    if passing is not None and (
        not isinstance(passing, list) or not all(isinstance(t, str) for t in passing)
    ):
        raise FormatError('"passing" must be a list of test names')
    return FailureObservation(failing, passing)


def save_observation(obs: FailureObservation, path) -> None:
    doc: dict = {"failing": sorted(obs.failing)}
    if obs.passing is not None:
        doc["passing"] = sorted(obs.passing)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# -- matrix persistence --------------------------------------------------------


def _format_from_path(path, format: str | None) -> str:
    if format is not None:
        return format
    return "json" if str(path).endswith(".json") else "csv"


def save_matrix(matrix: KillMatrix, path, format: str | None = None, *, extra: dict | None = None) -> None:
    """Write a matrix as CSV or JSON (inferred from the path by default).

    ``extra`` adds top-level keys to the JSON form (used by the CLI to
    embed run manifests); it is ignored for CSV.
    """
    fmt = _format_from_path(path, format)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = list(_CSV_FIXED_COLUMNS) + [
                _TEST_COLUMN_PREFIX + t for t in matrix.tests
            ]
            writer.writerow(header)
            for i, m in enumerate(matrix.mutants):
                cells = ["1" if k else "0" for k in matrix.kills[i]]
                writer.writerow([m.id, m.method, m.operator, m.description] + cells)
    elif fmt == "json":
        doc = matrix_to_json(matrix)
        if extra:
            doc.update(extra)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")


def matrix_to_json(matrix: KillMatrix) -> dict:
    return {
        "tests": list(matrix.tests),
        "mutants": [
            {
                "id": m.id,
                "method": m.method,
                "operator": m.operator,
                "description": m.description,
                "kills": [int(k) for k in matrix.kills[i]],
            }
            for i, m in enumerate(matrix.mutants)
        ],
    }


def load_matrix(path, format: str | None = None) -> KillMatrix:
    """Read a matrix file; schema violations raise :class:`FormatError`."""
    fmt = _format_from_path(path, format)
    if fmt == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            return _parse_csv(fh)
    if fmt == "json":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
        return matrix_from_json(doc)
    raise ValueError(f"unknown matrix format {fmt!r}")


def _parse_csv(fh) -> KillMatrix:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty file: missing header", line=1) from None
    if tuple(header[: len(_CSV_FIXED_COLUMNS)]) != _CSV_FIXED_COLUMNS:
        raise FormatError(
            f"header must start with {','.join(_CSV_FIXED_COLUMNS)}", line=1
        )
    tests = []
    for col in header[len(_CSV_FIXED_COLUMNS):]:
        if not col.startswith(_TEST_COLUMN_PREFIX) or len(col) == len(_TEST_COLUMN_PREFIX):
            raise FormatError(f"test column {col!r} must look like 't:<name>'", line=1)
        tests.append(col[len(_TEST_COLUMN_PREFIX):])
    if len(set(tests)) != len(tests):
        raise FormatError("duplicate test names in header", line=1)

    mutants = []
    rows = []
    seen_ids = set()
    for record in reader:
        line = reader.line_num
        if len(record) != len(header):
            raise FormatError(
                f"ragged row: expected {len(header)} cells, got {len(record)}", line=line
            )
        mutant_id, method, operator, description = record[: len(_CSV_FIXED_COLUMNS)]
        if not mutant_id:
            raise FormatError("empty mutant id", line=line)
        if mutant_id in seen_ids:
            raise FormatError(f"duplicate mutant id {mutant_id!r}", line=line)
        if not method:
            raise FormatError(f"mutant {mutant_id!r} has an empty method", line=line)
        seen_ids.add(mutant_id)
        cells = record[len(_CSV_FIXED_COLUMNS):]
        row = []
        for cell in cells:
            if cell not in ("0", "1"):
                raise FormatError(f"kill cell must be 0 or 1, got {cell!r}", line=line)
            row.append(cell == "1")
        mutants.append(MutantRecord(mutant_id, method, operator, description))
        rows.append(row)
    kills = np.array(rows, dtype=bool) if rows else np.empty((0, len(tests)), dtype=bool)
    return KillMatrix(tests, mutants, kills)


def matrix_from_json(doc) -> KillMatrix:
    if not isinstance(doc, dict) or "tests" not in doc or "mutants" not in doc:
        raise FormatError('matrix JSON must be an object with "tests" and "mutants"')
    tests = doc["tests"]
    if not isinstance(tests, list) or not all(isinstance(t, str) for t in tests):
        raise FormatError('"tests" must be a list of names')
    if len(set(tests)) != len(tests):
        raise FormatError("duplicate test names")
    mutants = []
    rows = []
    seen_ids = set()
    for entry in doc["mutants"]:
        if not isinstance(entry, dict):
            raise FormatError("each mutant must be an object")
        try:
            mutant_id = entry["id"]
            method = entry["method"]
            operator = entry["operator"]
            kills = entry["kills"]
        except KeyError as exc:
            raise FormatError(f"mutant entry missing field {exc.args[0]!r}") from None
        description = entry.get("description", "")
        if mutant_id in seen_ids:
            raise FormatError(f"duplicate mutant id {mutant_id!r}")
        seen_ids.add(mutant_id)
        if not isinstance(kills, list) or len(kills) != len(tests):
            raise FormatError(
                f"mutant {mutant_id!r}: kills must list one 0/1 per test"
            )
        row = []
        for cell in kills:
            if cell is True or cell is False or cell not in (0, 1):
                raise FormatError(f"mutant {mutant_id!r}: kill cell must be 0 or 1")
            row.append(bool(cell))
        mutants.append(MutantRecord(mutant_id, method, operator, description))
        rows.append(row)
    kills = np.array(rows, dtype=bool) if rows else np.empty((0, len(tests)), dtype=bool)
    return KillMatrix(tests, mutants, kills)
