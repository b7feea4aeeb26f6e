"""Reading, writing and validating ARFF datasets.

Supports the ``numeric`` (``integer``/``real``), ``string`` and nominal
attribute types, dense and sparse data rows, ``?`` missing values and
single/double quoted cells with backslash escapes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "MISSING",
    "ArffError",
    "AttributeSpec",
    "Instance",
    "Dataset",
    "Violation",
    "parse_arff",
    "write_arff",
    "load_arff",
    "save_arff",
    "validate",
]


class _Missing:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MISSING"

    def __reduce__(self):
        return (_Missing, ())


MISSING = _Missing()

NUMERIC = "numeric"
STRING = "string"
NOMINAL = "nominal"


class ArffError(ValueError):
    """Malformed ARFF input. ``line`` is 1-based, or None when unknown."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.reason = message
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in (NUMERIC, STRING, NOMINAL):
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        if self.kind == NOMINAL:
            object.__setattr__(self, "values", tuple(self.values or ()))
        elif self.values is not None:
            raise ValueError(f"{self.kind} attribute {self.name!r} takes no value list")

    @classmethod
    def numeric(cls, name: str) -> "AttributeSpec":
        return cls(name, NUMERIC)

    @classmethod
    def string(cls, name: str) -> "AttributeSpec":
        return cls(name, STRING)

    @classmethod
    def nominal(cls, name: str, values: Iterable[str]) -> "AttributeSpec":
        return cls(name, NOMINAL, tuple(values))

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL

    @property
    def is_numeric(self) -> bool:
        return self.kind == NUMERIC

    @property
    def is_string(self) -> bool:
        return self.kind == STRING

    def default(self):
        """Value of a cell left out of a sparse row."""
        if self.kind == NUMERIC:
            return 0.0
        if self.kind == NOMINAL:
            return self.values[0] if self.values else MISSING
        return ""

    def index_of(self, value: str) -> int:
        return self.values.index(value)


class Instance:
    """One data row.

    Dense rows keep every cell. Sparse rows keep only explicit cells and
    fall back to per-attribute defaults (shared across rows) for the rest.
    Equality is cell-wise, so dense and sparse forms of a row compare equal.
    """

    __slots__ = ("_cells", "_entries", "_defaults")

    def __init__(self, values: Iterable):
        self._cells = tuple(values)
        self._entries = None
        self._defaults = None

    @classmethod
    def sparse(cls, entries: dict[int, object], defaults: tuple) -> "Instance":
        inst = cls.__new__(cls)
        inst._cells = None
        inst._entries = dict(sorted(entries.items()))
        inst._defaults = defaults
        return inst

    @property
    def is_sparse(self) -> bool:
        return self._cells is None

    @property
    def values(self) -> tuple:
        if self._cells is not None:
            return self._cells
        cells = list(self._defaults)
        for i, v in self._entries.items():
            cells[i] = v
        return tuple(cells)

    def explicit_items(self) -> Iterator[tuple[int, object]]:
        """(index, value) of stored cells; every cell for dense rows."""
        if self._cells is not None:
            return iter(enumerate(self._cells))
        return iter(self._entries.items())

    def __len__(self):
        return len(self._cells) if self._cells is not None else len(self._defaults)

    def __getitem__(self, i):
        if self._cells is not None:
            return self._cells[i]
        if i < 0:
            i += len(self._defaults)
        if i in self._entries:
            return self._entries[i]
        return self._defaults[i]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return len(self) == len(other) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"Instance({list(self.values)!r})"


@dataclass(frozen=True)
class Dataset:
    relation: str
    attributes: tuple[AttributeSpec, ...]
    instances: tuple[Instance, ...] = ()
    class_index: int = -1

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        insts = tuple(i if isinstance(i, Instance) else Instance(i) for i in self.instances)
        object.__setattr__(self, "instances", insts)
        if self.attributes and self.class_index < 0:
            object.__setattr__(self, "class_index", len(self.attributes) + self.class_index)

    def __len__(self):
        return len(self.instances)

    @property
    def class_attribute(self) -> AttributeSpec:
        return self.attributes[self.class_index]

    @property
    def class_labels(self) -> tuple[str, ...]:
        return self.class_attribute.values

    def class_values(self) -> list:
        return [inst[self.class_index] for inst in self.instances]

    def class_codes(self) -> list[int]:
        """Class cells as indices into the declared label list."""
        labels = {v: i for i, v in enumerate(self.class_labels)}
        return [labels[v] for v in self.class_values()]

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise KeyError(name)

    def with_instances(self, instances: Iterable[Instance]) -> "Dataset":
        return Dataset(self.relation, self.attributes, tuple(instances), self.class_index)

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return self.with_instances(self.instances[i] for i in indices)


@dataclass(frozen=True)
class Violation:
    instance: int | None
    attribute: str | None
    message: str

    def __str__(self):
        where = []
        if self.instance is not None:
            where.append(f"instance {self.instance}")
        if self.attribute is not None:
            where.append(f"attribute {self.attribute!r}")
        return f"{', '.join(where) or 'dataset'}: {self.message}"


def validate(data: Dataset) -> list[Violation]:
    out = []
    names = set()
    for a in data.attributes:
        if not a.name:
            out.append(Violation(None, a.name, "empty attribute name"))
        if a.name in names:
            out.append(Violation(None, a.name, "duplicate attribute name"))
        names.add(a.name)
        if a.is_nominal:
            if not a.values:
                out.append(Violation(None, a.name, "nominal value list is empty"))
            elif len(set(a.values)) != len(a.values):
                out.append(Violation(None, a.name, "duplicate nominal value"))
    if not data.attributes:
        out.append(Violation(None, None, "dataset has no attributes"))
        return out
    if not 0 <= data.class_index < len(data.attributes):
        out.append(Violation(None, None, f"class index {data.class_index} out of range"))
    elif not data.class_attribute.is_nominal:
        out.append(Violation(None, data.class_attribute.name, "class must be nominal"))

    width = len(data.attributes)
    for k, inst in enumerate(data.instances):
        if len(inst) != width:
            out.append(Violation(k, None, f"arity mismatch: {len(inst)} cells for {width} attributes"))
            continue
        for a, v in zip(data.attributes, inst.values):
            if v is MISSING:
                continue
            if a.is_numeric:
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                    out.append(Violation(k, a.name, f"numeric cell holds {v!r}"))
            elif a.is_string:
                if not isinstance(v, str):
                    out.append(Violation(k, a.name, f"string cell holds {v!r}"))
            elif v not in a.values:
                out.append(Violation(k, a.name, f"undeclared nominal value {v!r}"))
    return out


# ---------------------------------------------------------------- reading

_WS = " \t\r"
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "0": "\0"}
_BARE_STOP = ",{}"


class _Scanner:
    """Cursor over one line. Tokens are (text, quoted)."""

    def __init__(self, text: str, line: int):
        self.s = text
        self.i = 0
        self.line = line

    def skip_ws(self):
        while self.i < len(self.s) and self.s[self.i] in _WS:
            self.i += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.i >= len(self.s)

    def peek(self) -> str:
        self.skip_ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise ArffError(f"expected {ch!r}", self.line)
        self.i += 1

    def token(self, stop: str = _BARE_STOP, spaces_end: bool = False) -> tuple[str, bool]:
        self.skip_ws()
        s = self.s
        if self.i >= len(s):
            raise ArffError("unexpected end of line", self.line)
        q = s[self.i]
        if q in "'\"":
            self.i += 1
            buf = []
            while True:
                if self.i >= len(s):
                    raise ArffError("unterminated quoted value", self.line)
                c = s[self.i]
                if c == "\\" and self.i + 1 < len(s):
                    nxt = s[self.i + 1]
                    buf.append(_ESCAPES.get(nxt, nxt))
                    self.i += 2
                elif c == q:
                    self.i += 1
                    return "".join(buf), True
                else:
                    buf.append(c)
                    self.i += 1
        start = self.i
        while self.i < len(s) and s[self.i] not in stop and not (spaces_end and s[self.i] in " \t"):
            if s[self.i] in "'\"":
                raise ArffError("quote inside unquoted value", self.line)
            self.i += 1
        tok = s[start:self.i].strip(_WS)
        if not tok:
            raise ArffError("empty value", self.line)
        return tok, False


def _keyword(line: str) -> tuple[str, str]:
    m = re.match(r"(\S+)[ \t]*(.*)", line)
    return m.group(1).lower(), m.group(2).strip(_WS)


def _parse_attribute(rest: str, line: int) -> AttributeSpec:
    sc = _Scanner(rest, line)
    if sc.at_end():
        raise ArffError("malformed header: attribute name missing", line)
    name, _ = sc.token(stop="{", spaces_end=True)
    if sc.at_end():
        raise ArffError(f"malformed header: attribute {name!r} has no type", line)
    if sc.peek() == "{":
        sc.i += 1
        values = []
        if sc.peek() == "}":
            raise ArffError(f"malformed header: empty nominal list for {name!r}", line)
        while True:
            v, _ = sc.token()
            values.append(v)
            c = sc.peek()
            sc.i += 1
            if c == "}":
                break
            if c != ",":
                raise ArffError("malformed header: bad nominal list", line)
        if not sc.at_end():
            raise ArffError("malformed header: text after nominal list", line)
        if len(set(values)) != len(values):
            raise ArffError(f"malformed header: duplicate nominal value in {name!r}", line)
        return AttributeSpec.nominal(name, values)
    kind = sc.s[sc.i:].strip().lower()
    if kind in ("numeric", "integer", "real"):
        return AttributeSpec.numeric(name)
    if kind == "string":
        return AttributeSpec.string(name)
    if kind.startswith(("date", "relational")):
        raise ArffError(f"unsupported attribute type {kind.split()[0]!r}", line)
    raise ArffError(f"malformed header: unknown type {kind!r} for {name!r}", line)


def _cell(attr: AttributeSpec, tok: str, quoted: bool, line: int):
    if tok == "?" and not quoted:
        return MISSING
    if attr.is_numeric:
        try:
            v = float(tok)
        except ValueError:
            raise ArffError(f"bad numeric value {tok!r} for {attr.name!r}", line) from None
        if not math.isfinite(v):
            raise ArffError(f"non-finite numeric value {tok!r} for {attr.name!r}", line)
        return v
    if attr.is_nominal and tok not in attr.values:
        raise ArffError(f"undeclared nominal value {tok!r} for {attr.name!r}", line)
    return tok


def _parse_dense(text: str, attrs: Sequence[AttributeSpec], line: int) -> Instance:
    sc = _Scanner(text, line)
    cells = []
    while True:
        tok, quoted = sc.token()
        if len(cells) >= len(attrs):
            raise ArffError(f"arity mismatch: more than {len(attrs)} values", line)
        cells.append(_cell(attrs[len(cells)], tok, quoted, line))
        if sc.at_end():
            break
        sc.expect(",")
    if len(cells) != len(attrs):
        raise ArffError(f"arity mismatch: {len(cells)} values for {len(attrs)} attributes", line)
    return Instance(cells)


def _parse_sparse(text: str, attrs: Sequence[AttributeSpec], defaults: tuple, line: int) -> Instance:
    sc = _Scanner(text, line)
    sc.expect("{")
    entries = {}
    if sc.peek() == "}":
        sc.i += 1
    else:
        while True:
            idx_tok, quoted = sc.token(spaces_end=True)
            try:
                idx = int(idx_tok)
            except ValueError:
                raise ArffError(f"bad sparse index {idx_tok!r}", line) from None
            if quoted or not 0 <= idx < len(attrs):
                raise ArffError(f"arity mismatch: sparse index {idx_tok} out of range", line)
            if idx in entries:
                raise ArffError(f"sparse index {idx} repeated", line)
            tok, quoted = sc.token()
            entries[idx] = _cell(attrs[idx], tok, quoted, line)
            c = sc.peek()
            sc.i += 1
            if c == "}":
                break
            if c != ",":
                raise ArffError("malformed sparse row", line)
    if not sc.at_end():
        raise ArffError("text after sparse row (instance weights are not supported)", line)
    return Instance.sparse(entries, defaults)


def parse_arff(text: str, class_index: int = -1) -> Dataset:
    """Parse ARFF text into a :class:`Dataset`.

    Raises :class:`ArffError` carrying the offending line number.
    """
    relation = None
    attrs: list[AttributeSpec] = []
    rows: list[Instance] = []
    in_data = False
    defaults = None
    # only "\n" ends a line; quoted cells may hold other separators
    lines = text.split("\n")
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip(_WS)
        if not stripped or stripped.startswith("%"):
            continue
        if not in_data:
            if not stripped.startswith("@"):
                raise ArffError("data row before header complete", lineno)
            kw, rest = _keyword(stripped)
            if kw == "@relation":
                if relation is not None:
                    raise ArffError("malformed header: second @relation", lineno)
                if not rest:
                    raise ArffError("malformed header: relation name missing", lineno)
                relation, _ = _Scanner(rest, lineno).token(stop="")
            elif kw == "@attribute":
                if relation is None:
                    raise ArffError("malformed header: @attribute before @relation", lineno)
                a = _parse_attribute(rest, lineno)
                if any(b.name == a.name for b in attrs):
                    raise ArffError(f"malformed header: duplicate attribute {a.name!r}", lineno)
                attrs.append(a)
            elif kw == "@data":
                if relation is None or not attrs:
                    raise ArffError("malformed header: @data before @relation/@attribute", lineno)
                in_data = True
                defaults = tuple(a.default() for a in attrs)
            else:
                raise ArffError(f"malformed header: unknown keyword {kw!r}", lineno)
            continue
        if stripped.startswith("{"):
            rows.append(_parse_sparse(stripped, attrs, defaults, lineno))
        else:
            rows.append(_parse_dense(stripped, attrs, lineno))
    if not in_data:
        raise ArffError("malformed header: no @data section", len(lines))

    data = Dataset(relation, tuple(attrs), tuple(rows), class_index)
    if not 0 <= data.class_index < len(attrs):
        raise ArffError(f"class index {class_index} out of range")
    if not data.class_attribute.is_nominal:
        raise ArffError(f"class attribute {data.class_attribute.name!r} must be nominal")
    return data


# ---------------------------------------------------------------- writing

_NEEDS_QUOTE = set(" \t\r\n,'\"%{}\\")


def _quote(s: str) -> str:
    if s and s != "?" and not (_NEEDS_QUOTE & set(s)) and s[0] != "@":
        return s
    out = (
        s.replace("\\", "\\\\")
        .replace("'", "\\'")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return f"'{out}'"


def _format_number(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _format_cell(attr: AttributeSpec, v) -> str:
    if v is MISSING:
        return "?"
    if attr.is_numeric:
        return _format_number(v)
    return _quote(v)


def _header(data: Dataset) -> list[str]:
    out = [f"@relation {_quote(data.relation)}", ""]
    for a in data.attributes:
        if a.is_nominal:
            kind = "{" + ",".join(_quote(v) for v in a.values) + "}"
        else:
            kind = a.kind
        out.append(f"@attribute {_quote(a.name)} {kind}")
    out += ["", "@data"]
    return out


def _is_default(attr: AttributeSpec, v) -> bool:
    if v is MISSING:
        return False
    if attr.is_numeric:
        return v == 0
    return v == attr.default()


def write_arff(data: Dataset, sparse: bool = False) -> str:
    lines = _header(data)
    attrs = data.attributes
    for inst in data.instances:
        if sparse:
            cells = [
                f"{i} {_format_cell(attrs[i], v)}"
                for i, v in inst.explicit_items()
                if not _is_default(attrs[i], v)
            ]
            lines.append("{" + ", ".join(cells) + "}")
        else:
            lines.append(",".join(_format_cell(a, v) for a, v in zip(attrs, inst.values)))
    return "\n".join(lines) + "\n"


def load_arff(path, class_index: int = -1) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_arff(fh.read(), class_index)


def save_arff(data: Dataset, path, sparse: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_arff(data, sparse))
