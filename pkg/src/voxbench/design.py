"""Voxel robot designs: representation, validity, sampling, mutation, hashing, parsing.

A design is a 5x5 material matrix (row 0 = top), codes:
    0 = empty, 1 = rigid, 2 = soft, 3 = horizontal actuator, 4 = vertical actuator.

A design is valid when it is non-empty, its non-empty cells form a single
4-connected component, and it has at least one actuator (an actuator-free
design has an empty action space, so controller optimization is undefined).
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

EMPTY, RIGID, SOFT, H_ACT, V_ACT = 0, 1, 2, 3, 4
NUM_CODES = 5
GRID_SIZE = 5
RETRY_CAP = 10_000


class DesignError(Exception):
    pass


class RetryCapExceeded(DesignError):
    """Rejection sampling failed to produce a valid design within the cap."""


class MutationFailure(RetryCapExceeded):
    """Mutation resampling failed to produce a valid design within the cap."""


class ParseError(DesignError):
    """Base for matrix-parsing failures; carries the offending text span."""

    def __init__(self, message: str, span: str = ""):
        super().__init__(f"{message}: {span!r}" if span else message)
        self.span = span


class NoMatrixFound(ParseError):
    pass


class BadDimensions(ParseError):
    pass


class BadCode(ParseError):
    pass


def as_matrix(cells) -> np.ndarray:
    """Coerce to a read-only int8 material matrix, checking shape and codes."""
    m = np.asarray(cells, dtype=np.int8)
    if m.ndim != 2 or m.shape != (GRID_SIZE, GRID_SIZE):
        raise BadDimensions(f"expected {GRID_SIZE}x{GRID_SIZE} matrix, got shape {m.shape}")
    if m.min() < 0 or m.max() >= NUM_CODES:
        raise BadCode(f"material codes must be in 0..{NUM_CODES - 1}")
    m = m.copy()
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class ValidityReport:
    connected: bool
    nonempty: bool
    has_actuator: bool

    @property
    def valid(self) -> bool:
        return self.connected and self.nonempty and self.has_actuator


@dataclass(frozen=True, eq=False)
class RobotDesign:
    """A validated design: the matrix plus its actuator cells in row-major order."""

    matrix: np.ndarray
    actuators: tuple[tuple[int, int, str], ...]

    @classmethod
    def from_matrix(cls, cells) -> "RobotDesign":
        m = as_matrix(cells)
        report = validate(m)
        if not report.valid:
            raise DesignError(f"invalid design: {report}")
        acts = []
        for r in range(m.shape[0]):
            for c in range(m.shape[1]):
                if m[r, c] == H_ACT:
                    acts.append((r, c, "h"))
                elif m[r, c] == V_ACT:
                    acts.append((r, c, "v"))
        return cls(matrix=m, actuators=tuple(acts))

    def __eq__(self, other) -> bool:
        return isinstance(other, RobotDesign) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return design_hash(self)


def validate(matrix) -> ValidityReport:
    """Judge a matrix: non-empty, 4-connected (diagonals do not connect), has actuator.

    An all-empty matrix counts as vacuously connected; it is invalid via nonempty.
    """
    m = np.asarray(matrix)
    filled = m != EMPTY
    n_filled = int(filled.sum())
    nonempty = n_filled > 0
    has_actuator = bool(((m == H_ACT) | (m == V_ACT)).any())
    if n_filled <= 1:
        return ValidityReport(connected=True, nonempty=nonempty, has_actuator=has_actuator)

    # flood fill from the first filled cell over the 4-neighborhood
    rows, cols = m.shape
    seen = np.zeros_like(filled)
    r0, c0 = np.argwhere(filled)[0]
    stack = [(int(r0), int(c0))]
    seen[r0, c0] = True
    count = 1
    while stack:
        r, c = stack.pop()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < rows and 0 <= nc < cols and filled[nr, nc] and not seen[nr, nc]:
                seen[nr, nc] = True
                count += 1
                stack.append((nr, nc))
    return ValidityReport(connected=count == n_filled, nonempty=True, has_actuator=has_actuator)


def random_design(rng: np.random.Generator, retry_cap: int = RETRY_CAP) -> RobotDesign:
    """Rejection-sample uniform matrices until one is valid. Deterministic per stream."""
    for _ in range(retry_cap):
        m = rng.integers(0, NUM_CODES, size=(GRID_SIZE, GRID_SIZE))
        if validate(m).valid:
            return RobotDesign.from_matrix(m)
    raise RetryCapExceeded(f"no valid design in {retry_cap} uniform draws")


def mutate(
    design: RobotDesign,
    rate: float,
    rng: np.random.Generator,
    retry_cap: int = RETRY_CAP,
) -> RobotDesign:
    """Resample each cell uniformly over all 5 codes with probability `rate`.

    Resampling is inclusive (a cell may redraw its current code). Invalid
    results are discarded and the whole mutation is redrawn from the original
    design, up to `retry_cap` attempts.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    base = design.matrix
    for _ in range(retry_cap):
        mask = rng.random(size=base.shape) < rate
        draws = rng.integers(0, NUM_CODES, size=base.shape)
        m = np.where(mask, draws, base)
        if validate(m).valid:
            return RobotDesign.from_matrix(m)
    raise MutationFailure(f"no valid mutation in {retry_cap} attempts at rate {rate}")


def actuator_count(design: RobotDesign | np.ndarray) -> int:
    m = design.matrix if isinstance(design, RobotDesign) else np.asarray(design)
    return int(((m == H_ACT) | (m == V_ACT)).sum())


def matrix_bytes(matrix) -> bytes:
    """Canonical binary form: 25 material codes, row-major, one byte each."""
    return np.asarray(matrix, dtype=np.uint8).tobytes()


def design_hash(design: RobotDesign | np.ndarray) -> int:
    """Stable 64-bit digest: first 8 bytes (big-endian) of SHA-256 over matrix_bytes."""
    m = design.matrix if isinstance(design, RobotDesign) else design
    digest = hashlib.sha256(matrix_bytes(m)).digest()
    return int.from_bytes(digest[:8], "big")


def render_matrix(matrix) -> str:
    """Canonical text form: 5 lines of 5 space-separated digits, newline-terminated."""
    m = np.asarray(matrix)
    return "".join(" ".join(str(int(v)) for v in row) + "\n" for row in m)


_BRACKET_RE = re.compile(r"\[\s*\[.*?\]\s*\]", re.DOTALL)
_ROW_TOKEN_RE = re.compile(r"^[\s,\[\]()]*(?:\d+[\s,\[\]()]*)+$")


def _check_rows(rows: list[list[int]], span: str) -> np.ndarray:
    if len(rows) != GRID_SIZE or any(len(r) != GRID_SIZE for r in rows):
        raise BadDimensions(
            f"expected {GRID_SIZE} rows of {GRID_SIZE} values, "
            f"got {[len(r) for r in rows]}",
            span,
        )
    m = np.array(rows)
    bad = (m < 0) | (m >= NUM_CODES)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise BadCode(f"material code {m[r, c]} outside 0..{NUM_CODES - 1}", span)
    return as_matrix(m)


def parse_matrix(text: str) -> np.ndarray:
    """Extract the first well-formed 5x5 material matrix from free-form text.

    Accepts either a bracketed integer array (JSON-style, possibly spanning
    lines) or 5 consecutive lines of 5 digits, tolerant of commas and
    brackets. If a candidate is found but malformed, the specific error
    (BadDimensions / BadCode) is raised with the offending span; if nothing
    matrix-like is present, NoMatrixFound.
    """
    first_error: ParseError | None = None

    # bracketed arrays, in document order
    for match in _BRACKET_RE.finditer(text):
        span = match.group(0)
        rows = []
        ok = True
        for row_m in re.finditer(r"\[([^\[\]]*)\]", span):
            tokens = re.split(r"[\s,]+", row_m.group(1).strip())
            tokens = [t for t in tokens if t]
            if not tokens or not all(re.fullmatch(r"-?\d+", t) for t in tokens):
                ok = False
                break
            rows.append([int(t) for t in tokens])
        if not ok or not rows:
            continue
        try:
            return _check_rows(rows, span)
        except ParseError as err:
            first_error = first_error or err

    # runs of digit lines
    lines = text.splitlines()
    run: list[list[int]] = []
    run_text: list[str] = []

    def flush():
        nonlocal first_error, run, run_text
        if run:
            try:
                return _check_rows(run[-GRID_SIZE:], "\n".join(run_text[-GRID_SIZE:]))
            except ParseError as err:
                first_error = first_error or err
            finally:
                run, run_text = [], []
        return None

    for line in lines:
        if line.strip() and _ROW_TOKEN_RE.match(line):
            tokens = [t for t in re.split(r"[\s,\[\]()]+", line.strip()) if t]
            run.append([int(t) for t in tokens])
            run_text.append(line)
            if len(run) >= GRID_SIZE and all(len(r) == GRID_SIZE for r in run[-GRID_SIZE:]):
                result = flush()
                if result is not None:
                    return result
        else:
            result = flush()
            if result is not None:
                return result
    result = flush()
    if result is not None:
        return result

    if first_error is not None:
        raise first_error
    raise NoMatrixFound("no 5x5 material matrix found in text")
