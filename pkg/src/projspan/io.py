"""Plain-text file formats used by the command-line tool.

All writers emit canonical text: single spaces between tokens, no trailing
whitespace, one trailing newline. Parsers accept any run of blanks or tabs
between tokens and ignore trailing blank lines, so written files re-read
bit-exactly while hand-edited ones still load. Errors carry the source name
and 1-based line number.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .completion import ObservedMatrix, ValidationCertificate
from .graph import BipartiteGraph
from .patterns import SamplingPattern
from .recovery import ProjectionObservation

__all__ = [
    "FormatError",
    "format_pattern",
    "parse_pattern",
    "read_pattern",
    "write_pattern",
    "format_matrix",
    "parse_matrix",
    "read_matrix",
    "write_matrix",
    "format_observations",
    "parse_observations",
    "read_observations",
    "write_observations",
    "format_observed_matrix",
    "parse_observed_matrix",
    "read_observed_matrix",
    "write_observed_matrix",
    "format_certificate",
    "write_certificate",
    "format_edge_list",
    "write_edge_list",
]


class FormatError(ValueError):
    """Malformed file content, located by source name and line number."""

    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


def _lines(text: str) -> list[str]:
    raw = text.split("\n")
    while raw and raw[-1].strip() == "":
        raw.pop()
    return raw


def _tokens(lines: list[str], idx: int, source: str) -> list[str]:
    if idx >= len(lines):
        raise FormatError("unexpected end of file", source, len(lines) + 1)
    return lines[idx].split()


def _ints(lines: list[str], idx: int, count: int, what: str, source: str) -> list[int]:
    toks = _tokens(lines, idx, source)
    if len(toks) != count:
        raise FormatError(
            f"expected {count} {what}, found {len(toks)}", source, idx + 1
        )
    out = []
    for t in toks:
        try:
            out.append(int(t))
        except ValueError:
            raise FormatError(f"not an integer: {t!r}", source, idx + 1) from None
    return out


def _floats(lines: list[str], idx: int, count: int, source: str) -> list[float]:
    toks = _tokens(lines, idx, source)
    if len(toks) != count:
        raise FormatError(
            f"expected {count} scalars, found {len(toks)}", source, idx + 1
        )
    out = []
    for t in toks:
        try:
            out.append(float(t))
        except ValueError:
            raise FormatError(f"not a number: {t!r}", source, idx + 1) from None
    return out


def _expect_length(lines: list[str], expected: int, source: str) -> None:
    if len(lines) > expected:
        raise FormatError("trailing content after the declared data", source, expected + 1)


def _bits_row(lines: list[str], idx: int, count: int, source: str) -> list[int]:
    vals = _ints(lines, idx, count, "0/1 digits", source)
    for v in vals:
        if v not in (0, 1):
            raise FormatError(f"entries must be 0 or 1, found {v}", source, idx + 1)
    return vals


# --- sampling patterns: header "d N r", then d rows of N digits ---


def format_pattern(p: SamplingPattern) -> str:
    rows = p.to_matrix()
    lines = [f"{p.d} {p.n_cols} {p.r}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def parse_pattern(text: str, source: str = "<string>") -> SamplingPattern:
    lines = _lines(text)
    d, n, r = _ints(lines, 0, 3, "header integers (d N r)", source)
    if d < 1 or n < 1:
        raise FormatError(f"header declares empty pattern ({d} rows, {n} columns)", source, 1)
    _expect_length(lines, 1 + d, source)
    matrix = np.zeros((d, n), dtype=np.uint8)
    for j in range(d):
        matrix[j, :] = _bits_row(lines, 1 + j, n, source)
    try:
        return SamplingPattern.from_matrix(matrix, r)
    except ValueError as e:
        raise FormatError(str(e), source) from None


def read_pattern(path) -> SamplingPattern:
    return parse_pattern(Path(path).read_text(), source=str(path))


def write_pattern(p: SamplingPattern, path) -> None:
    Path(path).write_text(format_pattern(p))


# --- dense matrices: header "rows cols", then one row per line ---


def format_matrix(m) -> str:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2:
        raise ValueError("only 2-D matrices have a text form")
    lines = [f"{arr.shape[0]} {arr.shape[1]}"]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in arr)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    lines = _lines(text)
    rows, cols = _ints(lines, 0, 2, "header integers (rows cols)", source)
    if rows < 1 or cols < 1:
        raise FormatError(f"header declares empty matrix ({rows}x{cols})", source, 1)
    _expect_length(lines, 1 + rows, source)
    out = np.empty((rows, cols), dtype=float)
    for j in range(rows):
        out[j, :] = _floats(lines, 1 + j, cols, source)
    if not np.all(np.isfinite(out)):
        raise FormatError("matrix entries must be finite", source)
    return out


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(), source=str(path))


def write_matrix(m, path) -> None:
    Path(path).write_text(format_matrix(m))


# --- projection observations: header "d r N", then per observation a mask
#     line of d digits and r lines holding the transposed (r+1) x r basis ---


def format_observations(observations: Sequence[ProjectionObservation], d: int, r: int) -> str:
    if len(observations) == 0:
        raise ValueError("at least one observation is required")
    lines = [f"{d} {r} {len(observations)}"]
    for k, obs in enumerate(observations):
        if obs.ambient_dim != d or obs.dim != r:
            raise ValueError(
                f"observation {k} has shape (d={obs.ambient_dim}, r={obs.dim}), "
                f"expected (d={d}, r={r})"
            )
        if obs.basis.shape[0] != r + 1:
            raise ValueError(
                f"observation {k} spans {obs.basis.shape[0]} coordinates; the "
                f"file format stores exactly r+1 = {r + 1}"
            )
        lines.append(" ".join(str(int(v)) for v in obs.mask.astype(int)))
        for col in obs.basis.T:
            lines.append(" ".join(repr(float(v)) for v in col))
    return "\n".join(lines) + "\n"


def parse_observations(
    text: str, source: str = "<string>"
) -> tuple[int, int, tuple[ProjectionObservation, ...]]:
    lines = _lines(text)
    d, r, n = _ints(lines, 0, 3, "header integers (d r N)", source)
    if d < 2 or r < 1 or n < 1:
        raise FormatError(f"implausible header d={d} r={r} N={n}", source, 1)
    per = 1 + r
    _expect_length(lines, 1 + n * per, source)
    observations = []
    for k in range(n):
        base = 1 + k * per
        mask = np.array(_bits_row(lines, base, d, source), dtype=bool)
        if int(mask.sum()) != r + 1:
            raise FormatError(
                f"observation {k + 1} mask has {int(mask.sum())} ones, expected r+1 = {r + 1}",
                source,
                base + 1,
            )
        basis_t = np.empty((r, r + 1), dtype=float)
        for j in range(r):
            basis_t[j, :] = _floats(lines, base + 1 + j, r + 1, source)
        try:
            observations.append(ProjectionObservation(mask=mask, basis=basis_t.T))
        except ValueError as e:
            raise FormatError(str(e), source, base + 1) from None
    return d, r, tuple(observations)


def read_observations(path) -> tuple[int, int, tuple[ProjectionObservation, ...]]:
    return parse_observations(Path(path).read_text(), source=str(path))


def write_observations(observations: Sequence[ProjectionObservation], d: int, r: int, path) -> None:
    Path(path).write_text(format_observations(observations, d, r))


# --- observed matrices: dense format with "*" at unobserved entries ---


def format_observed_matrix(data: ObservedMatrix) -> str:
    rows, cols = data.shape
    lines = [f"{rows} {cols}"]
    for j in range(rows):
        cells = [
            repr(float(data.values[j, i])) if data.mask[j, i] else "*"
            for i in range(cols)
        ]
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def parse_observed_matrix(text: str, source: str = "<string>") -> ObservedMatrix:
    lines = _lines(text)
    rows, cols = _ints(lines, 0, 2, "header integers (rows cols)", source)
    if rows < 1 or cols < 1:
        raise FormatError(f"header declares empty matrix ({rows}x{cols})", source, 1)
    _expect_length(lines, 1 + rows, source)
    values = np.zeros((rows, cols), dtype=float)
    mask = np.zeros((rows, cols), dtype=bool)
    for j in range(rows):
        toks = _tokens(lines, 1 + j, source)
        if len(toks) != cols:
            raise FormatError(
                f"expected {cols} entries, found {len(toks)}", source, j + 2
            )
        for i, t in enumerate(toks):
            if t == "*":
                continue
            try:
                values[j, i] = float(t)
            except ValueError:
                raise FormatError(f"not a number or '*': {t!r}", source, j + 2) from None
            if not np.isfinite(values[j, i]):
                raise FormatError("observed entries must be finite", source, j + 2)
            mask[j, i] = True
    return ObservedMatrix(values=values, mask=mask)


def read_observed_matrix(path) -> ObservedMatrix:
    return parse_observed_matrix(Path(path).read_text(), source=str(path))


def write_observed_matrix(data: ObservedMatrix, path) -> None:
    Path(path).write_text(format_observed_matrix(data))


# --- validation certificates: stable key-value text ---


def _index_list(indices) -> str:
    if indices is None or len(indices) == 0:
        return "-"
    return " ".join(str(int(i) + 1) for i in indices)


def format_certificate(cert: ValidationCertificate) -> str:
    lines = [
        f"verdict: {cert.verdict}",
        f"pattern-satisfied: {'yes' if cert.pattern_report.satisfied else 'no'}",
        f"pattern-checker: {cert.pattern_report.checker}",
        f"pattern-witness: {_index_list(cert.pattern_report.witness)}",
    ]
    for i, res in enumerate(cert.residuals):
        lines.append(f"residual {i + 1}: {res!r}")
    lines.append(f"split-training: {_index_list(cert.split[0])}")
    lines.append(f"split-holdout: {_index_list(cert.split[1])}")
    return "\n".join(lines) + "\n"


def write_certificate(cert: ValidationCertificate, path) -> None:
    Path(path).write_text(format_certificate(cert))


# --- bipartite graphs: one "row column" edge per line, 1-based ---


def format_edge_list(g: BipartiteGraph) -> str:
    lines = []
    for i, rows in enumerate(g.adjacency):
        lines.extend(f"{j + 1} {i + 1}" for j in rows)
    return "\n".join(lines) + ("\n" if lines else "")


def write_edge_list(g: BipartiteGraph, path) -> None:
    Path(path).write_text(format_edge_list(g))
