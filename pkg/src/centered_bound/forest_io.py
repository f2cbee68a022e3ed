"""Tree catalog files.

Two layouts are supported.

``forest.txt`` layout: the first line is a key list ``L``.  For k edges the
line ``L[k]`` lines below the first holds the number of k-edge codes, and the
codes follow one per line, entries in *reverse* order and separated by
whitespace.  The single-vertex tree has an empty code, written as an empty
line.  Key entries that are negative mark an absent section.

Catalog layout (any n, self-describing)::

    # centered-bound tree catalog v1
    n 9 count 29
    1 2 3 4 5 6
    ...

Codes there are written in natural order; ``-`` stands for the empty code.
"""

import os
import re
from dataclasses import dataclass

from .errors import InvalidCode, MissingCatalog, ParseError
from .trees import canonicalize, decode, enumerate_trees

ENV_VAR = "CENTERED_BOUND_FOREST"
CATALOG_HEADER = "# centered-bound tree catalog v1"

_INT = re.compile(r"[0-9]+\Z")
_KEY_TOKEN = re.compile(r"-?[0-9]+\Z")


@dataclass(frozen=True)
class ForestLibrary:
    """Tree codes grouped by edge count, in catalog order.

    ``source_order`` is ``"native"`` for generated libraries and ``"file"``
    when the ordering was read from disk.
    """

    per_k: dict
    source_order: str = "native"

    @classmethod
    def native(cls, max_k):
        return cls({k: tuple(enumerate_trees(k + 3)) for k in range(max_k + 1)})

    @property
    def max_k(self):
        return max(self.per_k) if self.per_k else -1

    def codes_for_n(self, n):
        k = n - 3
        if k not in self.per_k:
            raise MissingCatalog(f"catalog has no section for n = {n} (k = {k} edges)")
        return self.per_k[k]

    def __eq__(self, other):
        if not isinstance(other, ForestLibrary):
            return NotImplemented
        return self.per_k == other.per_k


def _decode_text(text):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError(f"non-ASCII byte at offset {exc.start}", None) from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _parse_key(line):
    body = line.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    tokens = [t for t in re.split(r"[,\s]+", body) if t]
    if not tokens:
        raise ParseError("key line is empty", 1)
    key = []
    for t in tokens:
        if not _KEY_TOKEN.match(t):
            raise ParseError(f"key entry {t!r} is not an integer", 1)
        key.append(int(t))
    return key


def _parse_code(line, k, lineno, reverse):
    tokens = line.split()
    if tokens == ["-"] and not reverse:
        tokens = []
    for t in tokens:
        if not _INT.match(t):
            raise ParseError(f"code entry {t!r} is not a nonnegative integer", lineno)
    if len(tokens) != k:
        raise ParseError(f"expected {k} entries, found {len(tokens)}", lineno)
    entries = [int(t) for t in tokens]
    code = tuple(reversed(entries)) if reverse else tuple(entries)
    try:
        tree = decode(code)
    except InvalidCode as exc:
        raise ParseError(f"invalid code {code}: {exc}", lineno) from exc
    return code, canonicalize(tree)


def _check_unique(section, k):
    seen = {}
    for code, canon, lineno in section:
        if canon in seen:
            raise ParseError(
                f"{k}-edge code {code} repeats the tree on line {seen[canon]}", lineno
            )
        seen[canon] = lineno


def parse_forest(text):
    """Read the ``forest.txt`` layout into a :class:`ForestLibrary`."""
    lines = _decode_text(text)
    if not lines:
        raise ParseError("file is empty", 1)
    key = _parse_key(lines[0])
    owner = {}
    per_k = {}
    for k, start in enumerate(key):
        if start < 0:
            continue
        if start == 0 or start >= len(lines):
            raise ParseError(f"key entry for k = {k} points to missing line {start + 1}", 1)
        count_line = lines[start].strip()
        if not _INT.match(count_line):
            raise ParseError(f"section k = {k}: count {count_line!r} is not an integer", start + 1)
        count = int(count_line)
        span = range(start, start + count + 1)
        if span.stop > len(lines):
            raise ParseError(
                f"section k = {k} declares {count} codes but the file ends first", start + 1
            )
        for i in span:
            if i in owner:
                raise ParseError(f"section k = {k} overlaps section k = {owner[i]}", i + 1)
            owner[i] = k
        section = []
        for i in range(start + 1, start + count + 1):
            code, canon = _parse_code(lines[i], k, i + 1, reverse=True)
            section.append((code, canon, i + 1))
        _check_unique(section, k)
        per_k[k] = tuple(code for code, _, _ in section)

    for i in range(1, len(lines)):
        if i not in owner and lines[i].strip():
            raise ParseError("line belongs to no section", i + 1)
    if not per_k:
        raise ParseError("key declares no sections", 1)
    if 0 not in per_k:
        per_k[0] = ((),)
    return ForestLibrary(dict(sorted(per_k.items())), source_order="file")


def write_forest(lib, max_k=None):
    """Serialize ``lib`` sections 0..max_k in the ``forest.txt`` layout."""
    max_k = lib.max_k if max_k is None else max_k
    body = []
    key = []
    for k in range(max_k + 1):
        if k not in lib.per_k:
            raise MissingCatalog(f"library has no {k}-edge section")
        codes = lib.per_k[k]
        key.append(len(body) + 1)
        body.append(str(len(codes)))
        body.extend(" ".join(str(x) for x in reversed(code)) for code in codes)
    head = "[" + ", ".join(str(x) for x in key) + "]"
    return ("\n".join([head] + body) + "\n").encode("ascii")


def parse_catalog(text):
    """Read the self-describing catalog layout."""
    lines = _decode_text(text)
    if not lines or lines[0].strip() != CATALOG_HEADER:
        raise ParseError(f"first line must be {CATALOG_HEADER!r}", 1)
    per_k = {}
    i = 1
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        m = re.fullmatch(r"n ([0-9]+) count ([0-9]+)", lines[i].strip())
        if not m:
            raise ParseError(f"expected 'n <n> count <c>', found {lines[i]!r}", i + 1)
        n, count = int(m.group(1)), int(m.group(2))
        if n < 3:
            raise ParseError(f"n must be at least 3, got {n}", i + 1)
        k = n - 3
        if k in per_k:
            raise ParseError(f"second block for n = {n}", i + 1)
        if i + count >= len(lines):
            raise ParseError(f"block n = {n} declares {count} codes but the file ends first", i + 1)
        section = []
        for j in range(i + 1, i + count + 1):
            code, canon = _parse_code(lines[j], k, j + 1, reverse=False)
            section.append((code, canon, j + 1))
        _check_unique(section, k)
        per_k[k] = tuple(code for code, _, _ in section)
        i += count + 1
    if not per_k:
        raise ParseError("catalog has no blocks", 1)
    return ForestLibrary(dict(sorted(per_k.items())), source_order="file")


def write_catalog(lib, ns=None):
    ks = sorted(lib.per_k) if ns is None else [n - 3 for n in ns]
    out = [CATALOG_HEADER]
    for k in ks:
        if k not in lib.per_k:
            raise MissingCatalog(f"library has no {k}-edge section")
        codes = lib.per_k[k]
        out.append(f"n {k + 3} count {len(codes)}")
        out.extend(" ".join(str(x) for x in code) if code else "-" for code in codes)
    return ("\n".join(out) + "\n").encode("ascii")


def parse_any(text):
    """Parse either layout, picking by the first line."""
    if isinstance(text, (bytes, bytearray)):
        first = bytes(text).split(b"\n", 1)[0].strip()
        is_catalog = first == CATALOG_HEADER.encode()
    else:
        is_catalog = text.split("\n", 1)[0].strip() == CATALOG_HEADER
    return parse_catalog(text) if is_catalog else parse_forest(text)


def load_library(path):
    with open(path, "rb") as fh:
        return parse_any(fh.read())


def library_from_env():
    """Library named by ``$CENTERED_BOUND_FOREST``, or None if unset."""
    path = os.environ.get(ENV_VAR)
    if not path:
        return None
    return load_library(path)


def completeness(lib):
    """Per edge count: (codes found, trees that exist)."""
    return {k: (len(codes), len(enumerate_trees(k + 3))) for k, codes in lib.per_k.items()}
