# semiclassical.py
# From a coherent pair to semiclassical certificates: the psi / phi families, the
# determinant systems for m >= k+N and m < k+N, the Phi-chain for k = 0, and momentwise
# verification of every functional equation they produce.
# Author: The Coherent Pairs Team

from dataclasses import dataclass, field as dataclass_field
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from . import audit
from .coherence_logic import CoherencePair
from .errors import BudgetError, PreconditionError
from .functional import MomentFunctional
from .polynomial import Polynomial, PolyMatrix
from .scalars import pochhammer

ROUTES = ("auto", "kzero", "m-ge", "m-lt")

CASE_KZERO = "kzero"
CASE_M_GE = "m_ge_k_plus_N"
CASE_M_LT = "m_lt_k_plus_N"


# ==============================================================================
# Result types
# ==============================================================================

@dataclass
class IdentityCheck:
    """Momentwise comparison of two functionals, with the degree it certifies."""

    name: str
    degree: int
    residuals: list
    holds: bool
    first_failure: Optional[int] = None
    field: object = None

    @property
    def max_residual(self):
        return max((abs(r) for r in self.residuals), default=self.field.zero)

    def to_dict(self) -> dict:
        result = {
            "name": self.name,
            "holds": self.holds,
            "verified_degree": self.degree,
            "max_residual": self.field.to_text(self.max_residual),
        }
        if not self.holds:
            result["first_failure"] = self.first_failure
        return result


@dataclass
class SemiclassicalCertificate:
    """D(phi w) = psi w, checked on the moments of w."""

    functional: str
    phi: Polynomial
    psi: Polynomial
    check: IdentityCheck
    raw_class_bound: int

    @property
    def class_bound(self) -> int:
        return max(self.raw_class_bound, 0)

    def to_dict(self) -> dict:
        return {
            "functional": self.functional,
            "Phi": self.phi.to_strings(),
            "Psi": self.psi.to_strings(),
            "class_bound": self.class_bound,
            "raw_class_bound": self.raw_class_bound,
            "verified_degree": self.check.degree,
            "holds": self.check.holds,
            "max_residual": self.check.to_dict()["max_residual"],
        }


@dataclass
class DeterminantSystem:
    case: str
    matrix: PolyMatrix
    determinants: Dict[str, Polynomial]
    solvable: bool

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "order": self.matrix.shape[0],
            "matrix": self.matrix.to_strings(),
            "determinants": {name: p.to_strings() for name, p in self.determinants.items()},
            "solvable": self.solvable,
        }


@dataclass
class PhiChain:
    polys: List[Polynomial]

    def __getitem__(self, j: int) -> Polynomial:
        return self.polys[j]

    @property
    def m(self) -> int:
        return len(self.polys) - 1

    def to_dict(self) -> dict:
        return {f"Phi_{j}": p.to_strings() for j, p in enumerate(self.polys)}


@dataclass
class SemiclassicalResult:
    case: str
    parameters: dict
    system: Optional[DeterminantSystem] = None
    chain: Optional[PhiChain] = None
    certificates: List[SemiclassicalCertificate] = dataclass_field(default_factory=list)
    identities: List[IdentityCheck] = dataclass_field(default_factory=list)
    theorem_bounds: Dict[str, int] = dataclass_field(default_factory=dict)
    hypothesis_failed: bool = False
    message: str = ""

    def all_checks(self) -> List[IdentityCheck]:
        return self.identities + [c.check for c in self.certificates]

    @property
    def verified(self) -> bool:
        return not self.hypothesis_failed and all(check.holds for check in self.all_checks())

    @property
    def verified_degree(self) -> Optional[int]:
        degrees = [check.degree for check in self.all_checks()]
        return min(degrees) if degrees else None

    def certificate(self, functional: str) -> Optional[SemiclassicalCertificate]:
        return next((c for c in self.certificates if c.functional == functional), None)

    def to_dict(self) -> dict:
        result = {
            "case": self.case,
            "parameters": self.parameters,
            "hypothesis_failed": self.hypothesis_failed,
            "verified": self.verified,
            "verified_degree": self.verified_degree,
            "certificates": [c.to_dict() for c in self.certificates],
            "identities": [check.to_dict() for check in self.identities],
        }
        if self.system is not None:
            result["system"] = self.system.to_dict()
        if self.chain is not None:
            result["chain"] = self.chain.to_dict()
        if self.theorem_bounds:
            result["theorem_bounds"] = self.theorem_bounds
        if self.message:
            result["message"] = self.message
        return result


# ==============================================================================
# Identity checks and certificates
# ==============================================================================

def check_identity(name: str, lhs: MomentFunctional, rhs: MomentFunctional,
                   degree: Optional[int] = None) -> IdentityCheck:
    """Compares lhs and rhs on moments 0..degree (capped by what both functionals carry)."""
    shared = min(lhs.max_degree, rhs.max_degree)
    degree = shared if degree is None else min(degree, shared)
    if degree < 0:
        raise BudgetError(f"{name}: no moments left to compare")
    field = lhs.field
    residuals = lhs.residuals(rhs, degree)
    first_failure = next(
        (n for n in range(degree + 1) if not field.equal(lhs.moments[n], rhs.moments[n])), None
    )
    if first_failure is not None:
        audit.log_warning(f"{name}: moment {first_failure} disagrees")
    return IdentityCheck(name, degree, residuals, first_failure is None, first_failure, field)


def class_bound(phi: Polynomial, psi: Polynomial) -> int:
    """max(deg phi - 2, deg psi - 1), not clamped."""
    if phi.is_zero() or psi.is_zero():
        raise PreconditionError("class bound of a certificate with a zero polynomial")
    return max(phi.degree - 2, psi.degree - 1)


def certify(functional_name: str, w: MomentFunctional, phi: Polynomial, psi: Polynomial,
            degree: Optional[int] = None) -> SemiclassicalCertificate:
    """Checks D(phi w) = psi w and attaches the class bound of (phi, psi)."""
    check = check_identity(
        f"D(Phi {functional_name}) = Psi {functional_name}",
        w.left_multiply(phi).derivative(),
        w.left_multiply(psi),
        degree,
    )
    raw = class_bound(phi, psi)
    if raw < 0:
        audit.log_info(f"class bound for {functional_name} is {raw} before clamping to 0")
    return SemiclassicalCertificate(functional_name, phi, psi, check, raw)


def transfer_certificate(phi: Polynomial, psi: Polynomial, link_v: Polynomial,
                         link_u: Polynomial) -> Tuple[Polynomial, Polynomial]:
    """
    Given D(phi u) = psi u and link_v v = link_u u, returns (Phi, Psi) with
    D(Phi v) = Psi v:  Phi = S R phi,  Psi = R (2 S' phi + S psi)  for R = link_v, S = link_u.
    """
    R, S = link_v, link_u
    return S * R * phi, R * (S.derivative() * phi * 2 + S * psi)


def _vanishes(p: Polynomial) -> bool:
    return p.is_zero() or all(p.field.is_zero(c) for c in p.coeffs)


def _combine(terms: Sequence[Tuple[Polynomial, MomentFunctional]]) -> MomentFunctional:
    total = None
    for poly, w in terms:
        part = w.left_multiply(poly)
        total = part if total is None else total + part
    return total


# ==============================================================================
# psi, phi, varphi, xi
# ==============================================================================

def build_psi(pair: CoherencePair, n: int) -> Polynomial:
    """
    psi(x;n) = sum_{j=n-N}^{n+M} (-1)^m (j+1)_m c_{j,n} P_{m+j} / h_{m+j}; terms with
    j < 0 are dropped.
    """
    field = pair.field
    m, N, M = pair.m, pair.N, pair.M
    sign = -1 if m % 2 else 1
    total = Polynomial([], field)
    for j in range(max(0, n - N), n + M + 1):
        c = pair.band.coefficient(j, n)
        if c == 0:
            continue
        weight = field.coerce(sign * pochhammer(j + 1, m)) * c / pair.P.norm(m + j)
        total = total + pair.P.poly(m + j).scale(weight)
    return total


def build_phi(pair: CoherencePair, n: int, j: int) -> Polynomial:
    """
    phi(x;n,j) = (-1)^k (n+1)_k / h^Q_{n+k}
                 * sum_{l=0}^{N-j} C(k+N, l) C(N-l, N-j-l) pi^(l) Q_{n+k}^(N-j-l).
    """
    N, k = pair.N, pair.k
    if not 0 <= j <= N:
        raise PreconditionError(f"phi(x;n,j) needs 0 <= j <= N={N}, got j={j}")
    field = pair.field
    Q = pair.Q.poly(n + k)
    total = Polynomial([], field)
    for l in range(N - j + 1):
        weight = comb(k + N, l) * comb(N - l, N - j - l)
        total = total + (pair.pi.derivative(l) * Q.derivative(N - j - l)).scale(weight)
    sign = -1 if k % 2 else 1
    return total.scale(field.coerce(sign * pochhammer(n + 1, k)) / pair.Q.norm(n + k))


def build_varphi(pair: CoherencePair, n: int, i: int,
                 phis: Optional[Sequence[Polynomial]] = None) -> Polynomial:
    """
    Coefficient of D^i v in D^r(sum_j phi(x;n,j) D^j v) with r = m-k-N:
        varphi(x;n,i) = sum_{j+l=i, 0<=j<=N, 0<=l<=r} C(r,l) phi(x;n,j)^(r-l).
    """
    r = pair.m - pair.k - pair.N
    if r < 0:
        raise PreconditionError("varphi is defined only for m >= k+N")
    if phis is None:
        phis = [build_phi(pair, n, j) for j in range(pair.N + 1)]
    total = Polynomial([], pair.field)
    for l in range(max(0, i - pair.N), min(r, i) + 1):
        total = total + phis[i - l].derivative(r - l).scale(comb(r, l))
    return total


def build_xi(pair: CoherencePair, n: int, j: int, psi: Optional[Polynomial] = None) -> Polynomial:
    """xi(x;n,j) = C(r,j) psi(x;n)^(r-j) with r = k+N-m, the Leibniz terms of D^r(psi u)."""
    r = pair.k + pair.N - pair.m
    if r < 0:
        raise PreconditionError("xi is defined only for m < k+N")
    if not 0 <= j <= r:
        raise PreconditionError(f"xi(x;n,j) needs 0 <= j <= {r}, got j={j}")
    psi = build_psi(pair, n) if psi is None else psi
    return psi.derivative(r - j).scale(comb(r, j))


def psi_family(pair: CoherencePair, n_max: int) -> List[Polynomial]:
    return [build_psi(pair, n) for n in range(n_max + 1)]


def phi_family(pair: CoherencePair, n_max: int) -> List[List[Polynomial]]:
    return [[build_phi(pair, n, j) for j in range(pair.N + 1)] for n in range(n_max + 1)]


def rows_needed(M: int, N: int, m: int, k: int, n_check: int = 0) -> int:
    """Band rows every route (and a lemma check up to n_check) reads."""
    if k == 0:
        top = m
    elif m >= k + N:
        top = m - k
    else:
        top = k - m + 2 * N
    return max(top, n_check) + M


def check_degree_laws(pair: CoherencePair, n_max: int) -> List[str]:
    """Every instance with deg psi(x;n) != m+n+M or deg phi(x;n,j) != k+n+j."""
    violations = []
    for n in range(n_max + 1):
        expected = pair.m + n + pair.M
        degree = build_psi(pair, n).degree
        if degree != expected:
            violations.append(f"deg psi(x;{n}) = {degree}, expected {expected}")
        for j in range(pair.N + 1):
            expected = pair.k + n + j
            degree = build_phi(pair, n, j).degree
            if degree != expected:
                violations.append(f"deg phi(x;{n},{j}) = {degree}, expected {expected}")
    if violations:
        audit.log_warning(f"{len(violations)} degree-law violations")
    return violations


# ==============================================================================
# Lemma identities
# ==============================================================================

def lemma_functionals(pair: CoherencePair, n: int) -> Tuple[MomentFunctional, MomentFunctional]:
    """
    Both sides of the row-n identity:
        m >= k+N:  psi(x;n) u           and  D^{m-k-N}(sum_j phi(x;n,j) D^j v)
        m <  k+N:  D^{k+N-m}(psi(x;n) u)  and  sum_j phi(x;n,j) D^j v
    """
    psi = build_psi(pair, n)
    phi_side = _combine(
        [(build_phi(pair, n, j), pair.v.derivative(j)) for j in range(pair.N + 1)]
    )
    shift = pair.m - pair.k - pair.N
    psi_side = pair.u.left_multiply(psi)
    if shift >= 0:
        return psi_side, phi_side.derivative(shift)
    return psi_side.derivative(-shift), phi_side


def verify_lemma_identities(pair: CoherencePair, n_check: int,
                            d_check: Optional[int] = None) -> List[IdentityCheck]:
    checks = []
    for n in range(n_check + 1):
        lhs, rhs = lemma_functionals(pair, n)
        checks.append(check_identity(f"lemma row n={n}", lhs, rhs, d_check))
    failed = [c.name for c in checks if not c.holds]
    if failed:
        audit.log_warning(f"lemma identities fail: {', '.join(failed)}")
    return checks


def check_varphi_identity(pair: CoherencePair, n: int,
                          d_check: Optional[int] = None) -> IdentityCheck:
    """psi(x;n) u = sum_i varphi(x;n,i) D^i v, the expanded form used by the A-system."""
    phis = [build_phi(pair, n, j) for j in range(pair.N + 1)]
    size = pair.m - pair.k + 1
    rhs = _combine(
        [(build_varphi(pair, n, i, phis), pair.v.derivative(i)) for i in range(size)]
    )
    lhs = pair.u.left_multiply(build_psi(pair, n))
    return check_identity(f"varphi row n={n}", lhs, rhs, d_check)


# ==============================================================================
# m >= k+N: the A-system
# ==============================================================================

def assemble_A(pair: CoherencePair) -> Tuple[DeterminantSystem, List[Polynomial]]:
    size = pair.m - pair.k + 1
    psis = [build_psi(pair, n) for n in range(size)]
    rows = []
    for n in range(size):
        phis = [build_phi(pair, n, j) for j in range(pair.N + 1)]
        rows.append([build_varphi(pair, n, i, phis) for i in range(size)])
    matrix = PolyMatrix(rows)
    A = matrix.det()
    determinants = {
        "A": A,
        "A1": matrix.with_column(0, psis).det(),
        "A2": matrix.with_column(1, psis).det(),
    }
    return DeterminantSystem(CASE_M_GE, matrix, determinants, not _vanishes(A)), psis


def derive_case_m_ge(pair: CoherencePair, d_check: Optional[int] = None) -> SemiclassicalResult:
    """
    Solves psi(x;n) u = sum_i varphi(x;n,i) D^i v, n = 0..m-k, by Cramer's rule:
    A v = A1 u and A Dv = A2 u. Certificates:
        D(A A1 u) = (2 A' A1 + A A2) u,   D(A A1 v) = ((A A1)' + A A2) v.
    """
    m, k, N = pair.m, pair.k, pair.N
    if m < k + N:
        raise PreconditionError(f"m={m} < k+N={k + N}: use the B-system")
    if N == 0 and m == k:
        raise PreconditionError("with N = 0 the A-system needs m > k")
    system, _ = assemble_A(pair)
    result = SemiclassicalResult(CASE_M_GE, pair.parameters(), system=system)
    if not system.solvable:
        result.hypothesis_failed = True
        result.message = "A vanishes identically; the determinant system gives no certificate"
        audit.log_warning(result.message)
        return result

    A, A1, A2 = (system.determinants[name] for name in ("A", "A1", "A2"))
    u, v = pair.u, pair.v
    result.identities.append(
        check_identity("A v = A1 u", v.left_multiply(A), u.left_multiply(A1), d_check)
    )
    result.identities.append(
        check_identity("A Dv = A2 u", v.derivative().left_multiply(A), u.left_multiply(A2), d_check)
    )
    for n in range(m - k + 1):
        result.identities.append(check_varphi_identity(pair, n, d_check))

    product = A * A1
    result.certificates.append(certify("u", u, product, A.derivative() * A1 * 2 + A * A2, d_check))
    result.certificates.append(certify("v", v, product, product.derivative() + A * A2, d_check))
    return result


# ==============================================================================
# m < k+N: the B-system
# ==============================================================================

def assemble_B(pair: CoherencePair) -> Tuple[DeterminantSystem, List[Polynomial]]:
    """
    Rows i = 0..k-m+2N of [phi(x;i,0..N) | -xi(x;i,1..r)]; the replacement column is xi(x;i,0).
    """
    N = pair.N
    r = pair.k + N - pair.m
    size = N + 1 + r
    rows, column = [], []
    for i in range(size):
        psi = build_psi(pair, i)
        row = [build_phi(pair, i, j) for j in range(N + 1)]
        row += [-build_xi(pair, i, j, psi) for j in range(1, r + 1)]
        rows.append(row)
        column.append(build_xi(pair, i, 0, psi))
    matrix = PolyMatrix(rows)
    B = matrix.det()
    determinants = {"B": B, "B1": matrix.with_column(0, column).det()}
    if N >= 1:
        determinants["B2"] = matrix.with_column(1, column).det()
    determinants[f"B{N + 2}"] = matrix.with_column(N + 1, column).det()
    return DeterminantSystem(CASE_M_LT, matrix, determinants, not _vanishes(B)), column


def derive_case_m_lt(pair: CoherencePair, d_check: Optional[int] = None) -> SemiclassicalResult:
    """
    Cramer's rule on D^r(psi u) = sum_j phi D^j v, r = k+N-m, with unknowns
    v, Dv, .., D^N v, Du, .., D^r u: B v = B1 u, B Du = B_{N+2} u and, for N >= 1,
    B Dv = B2 u. Certificates D(B u) = (B' + B_{N+2}) u and, for v,
    D(B B1 v) = ((B B1)' + B B2) v, or the transferred certificate when N = 0.
    """
    m, k, N = pair.m, pair.k, pair.N
    if m >= k + N:
        raise PreconditionError(f"m={m} >= k+N={k + N}: use the A-system")
    system, _ = assemble_B(pair)
    result = SemiclassicalResult(CASE_M_LT, pair.parameters(), system=system)
    if not system.solvable:
        result.hypothesis_failed = True
        result.message = "B vanishes identically; the determinant system gives no certificate"
        audit.log_warning(result.message)
        return result

    u, v = pair.u, pair.v
    B, B1 = system.determinants["B"], system.determinants["B1"]
    B_du = system.determinants[f"B{N + 2}"]
    result.identities.append(
        check_identity("B v = B1 u", v.left_multiply(B), u.left_multiply(B1), d_check)
    )
    result.identities.append(
        check_identity(f"B Du = B{N + 2} u", u.derivative().left_multiply(B), u.left_multiply(B_du), d_check)
    )
    if N >= 1:
        B2 = system.determinants["B2"]
        result.identities.append(
            check_identity("B Dv = B2 u", v.derivative().left_multiply(B), u.left_multiply(B2), d_check)
        )

    u_phi, u_psi = B, B.derivative() + B_du
    result.certificates.append(certify("u", u, u_phi, u_psi, d_check))
    if N >= 1:
        product = B * B1
        result.certificates.append(certify("v", v, product, product.derivative() + B * B2, d_check))
    else:
        v_phi, v_psi = transfer_certificate(u_phi, u_psi, B, B1)
        result.certificates.append(certify("v", v, v_phi, v_psi, d_check))
    return result


# ==============================================================================
# k = 0: the Phi-chain
# ==============================================================================

def build_phi_chain(pair: CoherencePair) -> PhiChain:
    """
    Phi(x;j) = (h^Q_j psi(x;j) - sum_{l<j} C(m,l) Q_j^(l) Phi(x;l)) / (j! C(m,j)), j = 0..m.
    """
    m = pair.m
    field = pair.field
    chain: List[Polynomial] = []
    for j in range(m + 1):
        acc = build_psi(pair, j).scale(pair.Q.norm(j))
        Q = pair.Q.poly(j)
        for l in range(j):
            acc = acc - (Q.derivative(l) * chain[l]).scale(comb(m, l))
        chain.append(acc.scale(field.one / (factorial(j) * comb(m, j))))
    expected = pair.M + m
    if chain[0].degree != expected:
        audit.log_warning(f"deg Phi(x;0) = {chain[0].degree}, expected {expected}")
    return PhiChain(chain)


def derive_kzero(pair: CoherencePair, d_check: Optional[int] = None) -> SemiclassicalResult:
    """
    For k = 0 the chain gives D^{m-j}(pi v) = Phi(x;j) u for j = 0..m, hence
        D(Phi_1 u) = Phi_0 u,   pi v = Phi_m u,   D(Phi_m pi v) = (Phi_m' + Phi_{m-1}) pi v,
    with class bounds M+m-1 for u and N+M+2(m-1) for v.
    """
    m, k, N, M = pair.m, pair.k, pair.N, pair.M
    if k != 0:
        raise PreconditionError(f"the Phi-chain needs k = 0, got k={k}")
    if m < 1:
        raise PreconditionError("the Phi-chain needs m >= 1")
    chain = build_phi_chain(pair)
    result = SemiclassicalResult(CASE_KZERO, pair.parameters(), chain=chain)
    result.theorem_bounds = {"u": M + m - 1, "v": N + M + 2 * (m - 1)}

    u, v, pi = pair.u, pair.v, pair.pi
    pi_v = v.left_multiply(pi)
    for j in range(m + 1):
        result.identities.append(
            check_identity(f"D^{m - j}(pi v) = Phi_{j} u", pi_v.derivative(m - j),
                           u.left_multiply(chain[j]), d_check)
        )

    result.certificates.append(certify("u", u, chain[1], chain[0], d_check))
    v_phi = chain[m] * pi
    v_psi = (chain[m].derivative() + chain[m - 1]) * pi
    result.certificates.append(certify("v", v, v_phi, v_psi, d_check))
    for name, bound in result.theorem_bounds.items():
        certificate = result.certificate(name)
        if certificate.class_bound > bound:
            audit.log_warning(f"class bound {certificate.class_bound} for {name} exceeds {bound}")
    return result


# ==============================================================================
# Routing
# ==============================================================================

def resolve_route(pair: CoherencePair, route: str = "auto") -> str:
    if route not in ROUTES:
        raise PreconditionError(f"unknown route {route!r}; choose one of {', '.join(ROUTES)}")
    if route != "auto":
        return route
    if pair.k == 0:
        return "kzero"
    return "m-ge" if pair.m >= pair.k + pair.N else "m-lt"


def derive(pair: CoherencePair, route: str = "auto", d_check: Optional[int] = None) -> SemiclassicalResult:
    chosen = resolve_route(pair, route)
    audit.log_info(f"semiclassical route {chosen} for (M,N,m,k)=({pair.M},{pair.N},{pair.m},{pair.k})")
    if chosen == "kzero":
        return derive_kzero(pair, d_check)
    if chosen == "m-ge":
        return derive_case_m_ge(pair, d_check)
    return derive_case_m_lt(pair, d_check)
