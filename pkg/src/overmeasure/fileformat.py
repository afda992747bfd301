"""Reading and writing observable and state files.

Files are small YAML documents (JSON is accepted too, being a subset)::

    dim: 2
    matrix:                      # dense Hermitian matrix, one row per item
      - [[0, 0], [1, 0]]         # entries are [re, im] pairs or bare reals
      - [[1, 0], [0, 0]]

or, with an explicit spectral form::

    dim: 2
    spectral:
      - value: -1
        projector:
          - [[0.5, 0], [-0.5, 0]]
          - [[-0.5, 0], [0.5, 0]]
      - value: 1
        projector: ...

Refinement output adds ``maps``, one list per coarser observable giving the
term it sends each refined term to. A state file holds ``dim`` and
``state``, a list of entries. Numbers are written with 17 significant
digits so that doubles survive the round trip. Every semantic error is
reported with the line and column of the offending node.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import OvermeasureError, ParseError
from .linalg import DEFAULT_TOL, Tolerance
from .observables import IndexSurjection, SpectralForm, from_matrix


@dataclass(frozen=True)
class ObservableFile:
    observable: SpectralForm
    maps: tuple[tuple[int, ...], ...] = ()


class _Reader:
    def __init__(self, text: str, source: str) -> None:
        self.source = source
        try:
            self.root = yaml.compose(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None) or getattr(exc, "context_mark", None)
            reason = getattr(exc, "problem", None) or getattr(exc, "context", None)
            raise ParseError(
                str(reason or exc),
                source,
                mark.line + 1 if mark else None,
                mark.column + 1 if mark else None,
            ) from None
        if self.root is None:
            raise ParseError("empty document", source)

    def fail(self, node: yaml.Node, message: str) -> ParseError:
        m = node.start_mark
        return ParseError(message, self.source, m.line + 1, m.column + 1)

    def mapping(self, node: yaml.Node) -> dict[str, tuple[yaml.Node, yaml.Node]]:
        if not isinstance(node, yaml.MappingNode):
            raise self.fail(node, "expected a mapping")
        out = {}
        for k, v in node.value:
            key = self.scalar(k)
            if key in out:
                raise self.fail(k, f"duplicate key {key!r}")
            out[key] = (k, v)
        return out

    def sequence(self, node: yaml.Node, length: int | None = None, what: str = "list") -> list[yaml.Node]:
        if not isinstance(node, yaml.SequenceNode):
            raise self.fail(node, f"expected a {what}")
        if length is not None and len(node.value) != length:
            raise self.fail(node, f"expected {length} items in {what}, found {len(node.value)}")
        return node.value

    def scalar(self, node: yaml.Node) -> str:
        if not isinstance(node, yaml.ScalarNode):
            raise self.fail(node, "expected a scalar")
        return node.value

    def real(self, node: yaml.Node) -> float:
        text = self.scalar(node)
        try:
            x = float(text)
        except ValueError:
            raise self.fail(node, f"expected a number, found {text!r}") from None
        if not np.isfinite(x):
            raise self.fail(node, f"non-finite number {text!r}")
        return x

    def integer(self, node: yaml.Node) -> int:
        text = self.scalar(node)
        try:
            return int(text)
        except ValueError:
            raise self.fail(node, f"expected an integer, found {text!r}") from None

    def complex(self, node: yaml.Node) -> complex:
        if isinstance(node, yaml.ScalarNode):
            return complex(self.real(node))
        re, im = self.sequence(node, 2, "[re, im] pair")
        return complex(self.real(re), self.real(im))

    def vector(self, node: yaml.Node, dim: int) -> np.ndarray:
        return np.array([self.complex(x) for x in self.sequence(node, dim, "vector")])

    def matrix(self, node: yaml.Node, dim: int) -> np.ndarray:
        rows = self.sequence(node, dim, "matrix")
        return np.array([[self.complex(x) for x in self.sequence(r, dim, "matrix row")] for r in rows])

    def dim(self, fields: dict) -> int:
        if "dim" not in fields:
            raise self.fail(self.root, "missing key 'dim'")
        node = fields["dim"][1]
        d = self.integer(node)
        if d < 1:
            raise self.fail(node, "dim must be positive")
        return d


def parse_observable(
    text: str, source: str = "<input>", tol: Tolerance = DEFAULT_TOL
) -> ObservableFile:
    r = _Reader(text, source)
    fields = r.mapping(r.root)
    unknown = set(fields) - {"dim", "matrix", "spectral", "maps"}
    if unknown:
        key = sorted(unknown)[0]
        raise r.fail(fields[key][0], f"unknown key {key!r}")
    d = r.dim(fields)
    if ("matrix" in fields) == ("spectral" in fields):
        raise r.fail(r.root, "give exactly one of 'matrix' or 'spectral'")

    if "matrix" in fields:
        node = fields["matrix"][1]
        m = r.matrix(node, d)
        try:
            form = from_matrix(m, tol)
        except OvermeasureError as exc:
            raise r.fail(node, str(exc)) from None
    else:
        node = fields["spectral"][1]
        terms = []
        for item in r.sequence(node, what="list of terms"):
            t = r.mapping(item)
            for key in ("value", "projector"):
                if key not in t:
                    raise r.fail(item, f"term is missing {key!r}")
            terms.append((r.real(t["value"][1]), r.matrix(t["projector"][1], d), item))
        if not terms:
            raise r.fail(node, "spectral form has no terms")
        seen: dict[float, yaml.Node] = {}
        for v, _, item in terms:
            if v in seen:
                raise r.fail(item, f"eigenvalue {v!r} repeats")
            seen[v] = item
        terms.sort(key=lambda t: t[0])
        try:
            form = SpectralForm(tuple(t[0] for t in terms), tuple(t[1] for t in terms))
            form.validate(tol)
        except OvermeasureError as exc:
            raise r.fail(node, str(exc)) from None

    maps: tuple[tuple[int, ...], ...] = ()
    if "maps" in fields:
        maps = tuple(
            tuple(r.integer(x) for x in r.sequence(row, len(form), "map"))
            for row in r.sequence(fields["maps"][1], what="list of maps")
        )
    return ObservableFile(form, maps)


def parse_state(text: str, source: str = "<input>") -> np.ndarray:
    r = _Reader(text, source)
    fields = r.mapping(r.root)
    d = r.dim(fields)
    if "state" not in fields:
        raise r.fail(r.root, "missing key 'state'")
    return r.vector(fields["state"][1], d)


def read_observable(path: str | Path, tol: Tolerance = DEFAULT_TOL) -> ObservableFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(exc.strerror or "cannot read file", str(path)) from None
    return parse_observable(text, str(path), tol)


def read_state(path: str | Path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(exc.strerror or "cannot read file", str(path)) from None
    return parse_state(text, str(path))


def fmt_real(x: float) -> str:
    x = float(x)
    if x == 0.0:
        return "0"  # also folds -0.0
    return format(x, ".17g")


def _fmt_entry(z: complex) -> str:
    return f"[{fmt_real(z.real)}, {fmt_real(z.imag)}]"


def _fmt_row(row: Sequence[complex]) -> str:
    return "[" + ", ".join(_fmt_entry(complex(z)) for z in row) + "]"


def format_observable(
    form: SpectralForm, maps: Sequence[IndexSurjection | Sequence[int]] = ()
) -> str:
    lines = [f"dim: {form.dim}", "spectral:"]
    for v, p in form.terms:
        lines.append(f"  - value: {fmt_real(v)}")
        lines.append("    projector:")
        lines.extend(f"      - {_fmt_row(row)}" for row in p)
    if maps:
        lines.append("maps:")
        for m in maps:
            image = m.image if isinstance(m, IndexSurjection) else tuple(m)
            lines.append("  - [" + ", ".join(str(i) for i in image) + "]")
    return "\n".join(lines) + "\n"


def format_matrix_observable(m: np.ndarray) -> str:
    lines = [f"dim: {m.shape[0]}", "matrix:"]
    lines.extend(f"  - {_fmt_row(row)}" for row in m)
    return "\n".join(lines) + "\n"


def format_state(v: np.ndarray) -> str:
    lines = [f"dim: {len(v)}", "state:"]
    lines.extend(f"  - {_fmt_entry(complex(z))}" for z in v)
    return "\n".join(lines) + "\n"
