"""0/1 matrices and the subshift quantities derived from them.

A 0/1 square matrix plays two roles: adjacency matrix of a subshift of
finite type, and crossing matrix assembled from block-image verdicts.
Everything here is exact integer or plain float work; the only iterative
piece is the Perron-root computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import BudgetExceeded, NoConvergence, NotChaotic, NotIrreducible

MatrixLike = Union["Matrix01", Sequence[Sequence[int]], np.ndarray]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERATIONS = 10**6
DEFAULT_WORD_BUDGET = 10**6


@dataclass(frozen=True)
class Matrix01:
    """Square matrix with entries in {0, 1}, stored immutably."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = len(self.entries)
        if m == 0:
            raise ValueError("matrix must have order >= 1")
        for row in self.entries:
            if len(row) != m:
                raise ValueError("matrix must be square")
            for a in row:
                if a not in (0, 1):
                    raise ValueError(f"entries must be 0 or 1, got {a!r}")

    @property
    def order(self) -> int:
        return len(self.entries)

    @classmethod
    def coerce(cls, A: MatrixLike) -> "Matrix01":
        if isinstance(A, Matrix01):
            return A
        arr = np.asarray(A)
        if arr.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        rows = []
        for row in arr.tolist():
            vals = []
            for a in row:
                if a != 0 and a != 1:
                    raise ValueError(f"entries must be 0 or 1, got {a!r}")
                vals.append(int(a))
            rows.append(tuple(vals))
        return cls(tuple(rows))

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    @classmethod
    def from_json(cls, data) -> "Matrix01":
        return cls.coerce(data)


@dataclass(frozen=True)
class SubshiftVerdict:
    """Classification of the subshift defined by a 0/1 matrix.

    ``minimal`` and ``chaotic`` are None when the matrix is reducible;
    they are only defined for irreducible matrices. ``degenerate`` marks
    the 1x1 extension of the usual order >= 2 setting.
    """

    irreducible: bool
    minimal: Optional[bool]
    chaotic: Optional[bool]
    spectral_radius: float
    entropy_lower_bound: float
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "minimal": self.minimal,
            "chaotic": self.chaotic,
            "spectral_radius": self.spectral_radius,
            "entropy_lower_bound": self.entropy_lower_bound,
        }


@dataclass(frozen=True)
class CountSequence:
    """Column sums of A^n for n = 1..n_max.

    ``counts[n - 1][j]`` is the number of admissible length-(n+1) symbol
    paths ending at j, i.e. the number of blocks (with multiplicity)
    whose image under the n-th iterate crosses block j.
    """

    matrix: Matrix01
    counts: tuple[tuple[int, ...], ...]

    def power(self, n: int) -> tuple[int, ...]:
        if not 1 <= n <= len(self.counts):
            raise IndexError(f"power {n} outside 1..{len(self.counts)}")
        return self.counts[n - 1]


def _strongly_connected_components(adj: np.ndarray) -> list[list[int]]:
    """Tarjan's algorithm, iterative to avoid recursion limits."""
    m = adj.shape[0]
    succ = [np.nonzero(adj[i])[0].tolist() for i in range(m)]
    index = [-1] * m
    low = [0] * m
    on_stack = [False] * m
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(m):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def is_irreducible(A: MatrixLike) -> bool:
    """True iff every ordered pair (i, j) is joined by a path of length >= 1.

    Equivalent to strong connectivity of the directed graph for order >= 2;
    a 1x1 matrix is irreducible only with a self-loop.
    """
    M = Matrix01.coerce(A)
    arr = M.to_numpy()
    if M.order == 1:
        return bool(arr[0, 0] == 1)
    return len(_strongly_connected_components(arr)) == 1


def is_minimal(A: MatrixLike) -> bool:
    """True iff the subshift is a single periodic orbit.

    For irreducible A this is decidable as: A is a (single-cycle)
    permutation matrix, i.e. every row and column sum equals 1.
    """
    M = Matrix01.coerce(A)
    if not is_irreducible(M):
        raise NotIrreducible("minimality is only defined for irreducible matrices")
    arr = M.to_numpy()
    return bool(np.all(arr.sum(axis=0) == 1) and np.all(arr.sum(axis=1) == 1))


def _perron_root(block: np.ndarray, tol: float, budget: int) -> tuple[float, int]:
    """Power iteration on block + I with a Collatz-Wielandt enclosure.

    For an irreducible block the shift makes the dominant eigenvalue
    strictly dominant (it defeats the periodicity of e.g. [[0,1],[1,0]]),
    and min/max of (Bx)_i / x_i over a positive iterate encloses the
    Perron root, so the stopping criterion bounds the true relative error.
    """
    k = block.shape[0]
    B = block.astype(np.float64) + np.eye(k)
    x = np.ones(k)
    for it in range(1, budget + 1):
        y = B @ x
        ratios = y / x
        lo = float(ratios.min())
        hi = float(ratios.max())
        if hi - lo <= tol * max(lo - 1.0, 1.0):
            return 0.5 * (lo + hi) - 1.0, it
        x = y / y.max()
    raise NoConvergence(
        f"Perron iteration used {budget} iterations without reaching tol={tol:g}"
    )


def spectral_radius(
    A: MatrixLike,
    tol: float = DEFAULT_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """Spectral radius of a 0/1 matrix with relative error <= tol.

    The matrix is reduced to its strongly connected components; the
    spectral radius is the maximum of the components' Perron roots (zero
    for the zero matrix). Each component is handled by power iteration
    on the shifted block, which converges geometrically because every
    component is irreducible.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = Matrix01.coerce(A)
    arr = M.to_numpy()
    budget = max_iterations
    rho = 0.0
    for comp in _strongly_connected_components(arr):
        if len(comp) == 1 and arr[comp[0], comp[0]] == 0:
            continue
        idx = np.array(sorted(comp))
        block = arr[np.ix_(idx, idx)]
        r, used = _perron_root(block, tol, budget)
        budget -= used
        rho = max(rho, r)
    return rho


def classify(A: MatrixLike, tol: float = DEFAULT_TOL) -> SubshiftVerdict:
    """Full verdict: irreducibility, minimality, chaos, entropy bound.

    Reducible or minimal input yields a verdict with bound 0, never an
    error. The entropy lower bound is ln(spectral radius) exactly when
    the subshift is chaotic (irreducible and not minimal).
    """
    M = Matrix01.coerce(A)
    irreducible = is_irreducible(M)
    rho = spectral_radius(M, tol)
    if irreducible:
        minimal = is_minimal(M)
        chaotic = not minimal
    else:
        minimal = None
        chaotic = None
    bound = math.log(rho) if chaotic else 0.0
    return SubshiftVerdict(
        irreducible=irreducible,
        minimal=minimal,
        chaotic=chaotic,
        spectral_radius=rho,
        entropy_lower_bound=bound,
        degenerate=(M.order == 1),
    )


def _column_sums_iter(M: Matrix01, n_max: int) -> list[list[int]]:
    """Column sums of A^n for n = 1..n_max in exact integer arithmetic."""
    rows = M.entries
    m = M.order
    # v starts as the all-ones row vector; after n products v = 1^T A^n.
    v = [1] * m
    out = []
    for _ in range(n_max):
        v = [sum(v[i] * rows[i][j] for i in range(m)) for j in range(m)]
        out.append(list(v))
    return out


def count_crossing_blocks(A: MatrixLike, n: int) -> list[int]:
    """Column-sum vector of A^n: entry j counts the admissible length-(n+1)
    symbol paths ending at j. Exact for any n (Python integers)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    M = Matrix01.coerce(A)
    return _column_sums_iter(M, n)[-1]


def count_sequence(A: MatrixLike, n_max: int) -> CountSequence:
    """CountSequence for powers 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    M = Matrix01.coerce(A)
    sums = _column_sums_iter(M, n_max)
    return CountSequence(matrix=M, counts=tuple(tuple(s) for s in sums))


def all_ones_rows(A: MatrixLike) -> list[int]:
    """Indices of rows whose entries are all 1."""
    M = Matrix01.coerce(A)
    return [i for i, row in enumerate(M.entries) if all(a == 1 for a in row)]


def recurrence_entropy_limit(A: MatrixLike, n_max: int) -> list[float]:
    """Sequence b_n = ln(S_{n-1}) / n for n = 2..n_max, converging to ln rho(A).

    S_k aggregates the column sums of A^k over the all-ones rows: a path
    ending in an all-ones row yields a sub-block whose next image crosses
    every block, so S_k counts the complete-crossing sub-blocks available
    at step k+1. When no all-ones row exists, S_k falls back to the total
    path count (sum of all entries of A^k), which has the same growth rate.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    M = Matrix01.coerce(A)
    if not is_irreducible(M):
        raise NotChaotic("recurrence limit requires an irreducible matrix")
    if is_minimal(M):
        raise NotChaotic("recurrence limit requires a non-minimal matrix")
    rows = all_ones_rows(M)
    sums = _column_sums_iter(M, n_max - 1)
    out = []
    for n in range(2, n_max + 1):
        cols = sums[n - 2]
        s = sum(cols[j] for j in rows) if rows else sum(cols)
        out.append(math.log(s) / n)
    return out


def proposition_bound(A: MatrixLike) -> Optional[float]:
    """Entropy bound (1/2) ln(sum of in-degrees of the all-ones rows).

    Each of the N_j blocks feeding an all-ones row j yields a complete
    crossing block for the second iterate. Returns None when the matrix
    has no all-ones row; requires irreducibility.
    """
    M = Matrix01.coerce(A)
    if not is_irreducible(M):
        raise NotIrreducible("proposition bound requires an irreducible matrix")
    rows = all_ones_rows(M)
    if not rows:
        return None
    arr = M.to_numpy()
    total = int(sum(arr[:, j].sum() for j in rows))
    return 0.5 * math.log(total)


def enumerate_words(
    A: MatrixLike, n: int, budget: int = DEFAULT_WORD_BUDGET
) -> list[tuple[int, ...]]:
    """All admissible words s_0..s_{n-1} with a[s_i][s_{i+1}] = 1.

    Raises BudgetExceeded when m**n exceeds the enumeration budget.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    M = Matrix01.coerce(A)
    m = M.order
    if m**n > budget:
        raise BudgetExceeded(f"m^n = {m}^{n} exceeds budget {budget}")
    rows = M.entries
    words: list[tuple[int, ...]] = []
    stack: list[tuple[int, ...]] = [(s,) for s in range(m - 1, -1, -1)]
    while stack:
        w = stack.pop()
        if len(w) == n:
            words.append(w)
            continue
        last = w[-1]
        for s in range(m - 1, -1, -1):
            if rows[last][s]:
                stack.append(w + (s,))
    return words
