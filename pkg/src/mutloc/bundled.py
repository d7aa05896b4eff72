"""Access to the data files shipped with the package.

Two fixtures live under ``mutloc/data``:

* ``acme_example.csv`` -- a seven-mutant, four-test matrix over two
  methods of a fictional ``com.acme.Foo`` class.  Small enough to check
  every model by hand; used throughout the docs and tests.
* ``demo/`` -- a toy-language integer library (``program.toy``), its
  test suite (``tests.toytest``), and the golden kill matrix the
  mutation engine produces for them (``matrix.csv``, built with
  ``--step-limit 2000``).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .matrix import KillMatrix, load_matrix

DEMO_STEP_LIMIT = 2_000


def data_path(*parts: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(str(resources.files("mutloc").joinpath("data", *parts)))


def example_matrix_path() -> Path:
    return data_path("acme_example.csv")


def example_matrix() -> KillMatrix:
    return load_matrix(example_matrix_path())


def demo_program_path() -> Path:
    return data_path("demo", "program.toy")


def demo_tests_path() -> Path:
    return data_path("demo", "tests.toytest")


def demo_matrix_path() -> Path:
    return data_path("demo", "matrix.csv")


def demo_matrix() -> KillMatrix:
    return load_matrix(demo_matrix_path())
