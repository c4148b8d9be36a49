"""Text file formats for matrices, functions and report tables.

MatrixFile::

    kind hermitian            # or: general
    n 2
    1 0                       # n*n lines "re im", row-major
    ...

FunctionFile (trigonometric polynomial)::

    kind trigpoly
    omega 1
    terms 2
    1 0 0 -0.5                # lines "j k re im"
    -1 0 0 0.5

FunctionFile (phi lattice)::

    kind philattice
    N 2
    0 0                       # N*N lines "re im" for tau, row-major
    ...

Numbers are written with 17 significant digits, which round-trips doubles.
Blank lines and ``#`` comments are ignored on read.
"""
from __future__ import annotations

import numpy as np

from .functions2d import PhiLattice, TrigPoly2D
from .linalg import check_hermitian


class FormatError(ValueError):
    """A file does not follow its declared format."""


def fmt(x) -> str:
    return format(float(x), ".17g")


def _lines(text):
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def _header(lines, pos, key, cast):
    if pos >= len(lines) or len(lines[pos]) != 2 or lines[pos][0] != key:
        raise FormatError(f"expected '{key} <value>' at record {pos + 1}")
    try:
        return cast(lines[pos][1])
    except ValueError as exc:
        raise FormatError(f"bad value for {key}: {lines[pos][1]!r}") from exc


def _numbers(lines, start, count, width, cast=float):
    rows = lines[start : start + count]
    if len(rows) != count:
        raise FormatError(f"expected {count} data lines, found {len(rows)}")
    try:
        return [[cast(v) for v in row] for row in rows if len(row) == width or _bad(row, width)]
    except ValueError as exc:
        raise FormatError(f"non-numeric entry: {exc}") from exc


def _bad(row, width):
    raise FormatError(f"expected {width} fields per line, got {' '.join(row)!r}")


def dumps_matrix(M, kind="general") -> str:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix files hold square matrices")
    if kind not in ("hermitian", "general"):
        raise ValueError(f"unknown kind {kind!r}")
    out = [f"kind {kind}", f"n {M.shape[0]}"]
    out += [f"{fmt(z.real)} {fmt(z.imag)}" for z in M.ravel()]
    return "\n".join(out) + "\n"


def loads_matrix(text):
    """Return ``(matrix, kind)``; hermitian files are validated on load."""
    lines = _lines(text)
    kind = _header(lines, 0, "kind", str)
    if kind not in ("hermitian", "general"):
        raise FormatError(f"unknown matrix kind {kind!r}")
    n = _header(lines, 1, "n", int)
    if n < 0:
        raise FormatError("n must be nonnegative")
    if len(lines) != 2 + n * n:
        raise FormatError(f"expected {n * n} entries, found {len(lines) - 2}")
    vals = np.array(_numbers(lines, 2, n * n, 2), dtype=float).reshape(n * n, 2) if n else np.zeros((0, 2))
    M = (vals[:, 0] + 1j * vals[:, 1]).reshape(n, n)
    if not np.all(np.isfinite(M)):
        raise FormatError("non-finite matrix entry")
    if kind == "hermitian":
        try:
            check_hermitian(M)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    return M, kind


def dumps_function(f) -> str:
    if isinstance(f, TrigPoly2D):
        out = ["kind trigpoly", f"omega {fmt(f.omega)}", f"terms {len(f.coefs)}"]
        for (j, k), c in sorted(f.coefs.items()):
            out.append(f"{j} {k} {fmt(c.real)} {fmt(c.imag)}")
    elif isinstance(f, PhiLattice):
        out = ["kind philattice", f"N {f.N}"]
        out += [f"{fmt(z.real)} {fmt(z.imag)}" for z in f.tau.ravel()]
    else:
        raise ValueError(f"cannot serialize {type(f).__name__}")
    return "\n".join(out) + "\n"


def loads_function(text):
    lines = _lines(text)
    kind = _header(lines, 0, "kind", str)
    if kind == "trigpoly":
        omega = _header(lines, 1, "omega", float)
        terms = _header(lines, 2, "terms", int)
        if len(lines) != 3 + terms:
            raise FormatError(f"expected {terms} terms, found {len(lines) - 3}")
        coefs = {}
        for row in lines[3:]:
            if len(row) != 4:
                _bad(row, 4)
            try:
                j, k, re, im = int(row[0]), int(row[1]), float(row[2]), float(row[3])
            except ValueError as exc:
                raise FormatError(f"bad term line {' '.join(row)!r}") from exc
            coefs[(j, k)] = coefs.get((j, k), 0) + complex(re, im)
        try:
            return TrigPoly2D(omega, coefs)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if kind == "philattice":
        N = _header(lines, 1, "N", int)
        if N < 1 or len(lines) != 2 + N * N:
            raise FormatError(f"expected {N * N} tau entries, found {len(lines) - 2}")
        vals = np.array(_numbers(lines, 2, N * N, 2), dtype=float)
        return PhiLattice((vals[:, 0] + 1j * vals[:, 1]).reshape(N, N))
    raise FormatError(f"unknown function kind {kind!r}")


def read_matrix(path):
    with open(path) as fh:
        return loads_matrix(fh.read())


def write_matrix(path, M, kind="general"):
    with open(path, "w") as fh:
        fh.write(dumps_matrix(M, kind))


def read_function(path):
    with open(path) as fh:
        return loads_function(fh.read())


def write_function(path, f):
    with open(path, "w") as fh:
        fh.write(dumps_function(f))


def dumps_table(columns, rows, summary=()) -> str:
    """Tab-separated table with a header line; floats at 17 significant
    digits; ``summary`` pairs are appended as ``# key<TAB>value`` lines."""

    def cell(v):
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return fmt(v)
        return str(v)

    out = ["\t".join(columns)]
    out += ["\t".join(cell(v) for v in row) for row in rows]
    out += [f"# {key}\t{cell(value)}" for key, value in summary]
    return "\n".join(out) + "\n"


def loads_table(text):
    """Return ``(columns, rows, summary)`` with numeric cells as floats."""
    lines = text.splitlines()
    columns = lines[0].split("\t")
    rows, summary = [], {}
    for line in lines[1:]:
        if line.startswith("# "):
            key, value = line[2:].split("\t")
            summary[key] = value
        elif line:
            rows.append([float(v) for v in line.split("\t")])
    return columns, rows, summary
