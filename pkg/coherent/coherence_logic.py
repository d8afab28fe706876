# coherence_logic.py
# Detection and verification of the structure relation
#     pi P_n^[m] = sum_{j=n-M}^{n+N} c_{n,j} Q_j^[k]
# that defines a pi-coherent pair of index M and order (m, k).
# Author: The Coherent Pairs Team

from dataclasses import dataclass, field as dataclass_field
from typing import List, Optional, Tuple

from . import audit
from .errors import CacheDepthError, PreconditionError
from .functional import MomentFunctional
from .ops_logic import MonicOPS, expand_in_basis, ops_from_functional
from .polynomial import Polynomial


@dataclass(frozen=True)
class CoherenceBand:
    """
    Full expansion table: row n holds c_{n,0..n+N}. Entries outside a row read as zero,
    following the convention Q_j = 0 for j < 0.
    """

    rows: Tuple[tuple, ...]
    N: int
    field: object

    @property
    def n_max(self) -> int:
        return len(self.rows) - 1

    def row(self, n: int) -> tuple:
        if not 0 <= n <= self.n_max:
            raise CacheDepthError(f"band row {n} requested, rows computed up to {self.n_max}")
        return self.rows[n]

    def coefficient(self, n: int, j: int):
        row = self.row(n)
        if 0 <= j < len(row):
            return row[j]
        return self.field.zero

    def row_scale(self, n: int):
        return max((abs(c) for c in self.row(n)), default=self.field.zero)

    def is_zero(self, n: int, j: int) -> bool:
        """Zero test; on the float backend it is relative to the largest entry of row n."""
        return self.field.is_zero(self.coefficient(n, j), scale=self.row_scale(n))

    def with_entry(self, n: int, j: int, value) -> "CoherenceBand":
        """Copy with c_{n,j} replaced."""
        row = list(self.row(n))
        if not 0 <= j < len(row):
            raise PreconditionError(f"c_{{{n},{j}}} lies outside row {n}")
        row[j] = self.field.coerce(value)
        rows = list(self.rows)
        rows[n] = tuple(row)
        return CoherenceBand(tuple(rows), self.N, self.field)

    def to_rows(self) -> List[dict]:
        """Rows trimmed to their nonzero support, for reports."""
        dumped = []
        for n, row in enumerate(self.rows):
            j_min = next((j for j in range(len(row)) if not self.is_zero(n, j)), len(row) - 1)
            dumped.append({
                "n": n,
                "j_min": j_min,
                "coefficients": [self.field.to_text(c) for c in row[j_min:]],
            })
        return dumped


@dataclass(frozen=True)
class Verdict:
    holds: bool
    M: int
    N: int
    n_max: int
    n: Optional[int] = None
    j: Optional[int] = None
    reason: str = ""

    def to_dict(self) -> dict:
        result = {"holds": self.holds, "M": self.M, "N": self.N, "n_max": self.n_max}
        if not self.holds:
            result["violation"] = {"n": self.n, "j": self.j, "reason": self.reason}
        return result


def compute_band(P: MonicOPS, Q: MonicOPS, pi: Polynomial, m: int, k: int, n_max: int) -> CoherenceBand:
    """
    Expands pi P_n^[m] in the monic basis {Q_j^[k]} for n = 0..n_max. No band shape is
    assumed; verify_coherence decides which entries must vanish.
    """
    if not pi.is_monic():
        raise PreconditionError("pi must be monic")
    N = pi.degree
    if P.depth < n_max + m:
        raise CacheDepthError(f"band to n={n_max} needs P up to {n_max + m}, cache holds {P.depth}")
    if Q.depth < n_max + N + k:
        raise CacheDepthError(f"band to n={n_max} needs Q up to {n_max + N + k}, cache holds {Q.depth}")
    basis = [Q.normalized_derivative(k, j) for j in range(n_max + N + 1)]
    rows = []
    for n in range(n_max + 1):
        lhs = pi * P.normalized_derivative(m, n)
        rows.append(tuple(expand_in_basis(lhs, basis[: n + N + 1])))
    return CoherenceBand(tuple(rows), N, pi.field)


def verify_coherence(band: CoherenceBand, M: int, N: Optional[int] = None,
                     n_max: Optional[int] = None) -> Verdict:
    """
    Checks c_{n,n+N} = 1, c_{n,j} = 0 for j < n-M and c_{n,n-M} != 0 for n >= M, row by
    row, and returns the first violation. Rows with n < M carry no lower constraint.
    """
    N = band.N if N is None else N
    if N != band.N:
        raise PreconditionError(f"band was computed for N={band.N}, asked to verify N={N}")
    n_max = band.n_max if n_max is None else n_max
    if n_max > band.n_max:
        raise CacheDepthError(f"verification to n={n_max} but band stops at {band.n_max}")
    field = band.field
    for n in range(n_max + 1):
        if not field.equal(band.coefficient(n, n + N), field.one):
            return Verdict(False, M, N, n_max, n, n + N, "leading coefficient c_{n,n+N} differs from 1")
        for j in range(0, n - M):
            if not band.is_zero(n, j):
                return Verdict(False, M, N, n_max, n, j, "nonzero coefficient below the band")
        if n >= M and band.is_zero(n, n - M):
            return Verdict(False, M, N, n_max, n, n - M, "c_{n,n-M} vanishes")
    return Verdict(True, M, N, n_max)


def discover_index(band: CoherenceBand, n_max: Optional[int] = None) -> Optional[dict]:
    """
    Smallest index M for which the band verdict holds up to n_max. N is fixed by deg pi.
    Returns None when no M below n_max works.
    """
    n_max = band.n_max if n_max is None else n_max
    for M in range(max(n_max, 1)):
        if verify_coherence(band, M, band.N, n_max).holds:
            return {"M": M, "N": band.N}
    return None


@dataclass
class CoherencePair:
    """Two functionals, their OPS, the structure parameters and the computed band."""

    u: MomentFunctional
    v: MomentFunctional
    P: MonicOPS
    Q: MonicOPS
    pi: Polynomial
    M: int
    m: int
    k: int
    band: CoherenceBand
    verdict: Verdict = dataclass_field(default=None)

    @property
    def N(self) -> int:
        return self.pi.degree

    @property
    def field(self):
        return self.pi.field

    def parameters(self) -> dict:
        return {"M": self.M, "N": self.N, "m": self.m, "k": self.k, "pi": self.pi.to_strings()}


def pair_depths(N: int, m: int, k: int, band_rows: int) -> Tuple[int, int]:
    """OPS depths (for P and Q) needed by a band with rows 0..band_rows and every formula built on it."""
    return band_rows + m, band_rows + N + k


def pair_from_ops(u: MomentFunctional, v: MomentFunctional, P: MonicOPS, Q: MonicOPS,
                  pi: Polynomial, M: int, m: int, k: int, band_rows: int) -> CoherencePair:
    band = compute_band(P, Q, pi, m, k, band_rows)
    verdict = verify_coherence(band, M)
    if not verdict.holds:
        audit.log_warning(
            f"structure relation fails at (n={verdict.n}, j={verdict.j}): {verdict.reason}"
        )
    return CoherencePair(u, v, P, Q, pi, M, m, k, band, verdict)


def build_pair(u: MomentFunctional, v: MomentFunctional, pi: Polynomial, M: int, m: int, k: int,
               band_rows: int) -> CoherencePair:
    """Generates P and Q from the moments (Stieltjes procedure) deep enough for band_rows."""
    p_depth, q_depth = pair_depths(pi.degree, m, k, band_rows)
    P = ops_from_functional(u, p_depth)
    Q = ops_from_functional(v, q_depth)
    audit.log_info(f"built OPS pair: P to n={p_depth}, Q to n={q_depth}")
    return pair_from_ops(u, v, P, Q, pi, M, m, k, band_rows)
