"""Representation-valued invariants via state sums, plus the recovery cross-check.

A representation is supplied as raw matrix data over the truncated scalar
ring: the braiding matrix ``R`` of a positive crossing and the rotation weight
``h`` (the image of the clockwise rotation element) with its inverse.  The
state sum over index assignments is evaluated by sequential tensor contraction
along the strand, so the cost is polynomial in the number of segments for a
fixed dimension; the full state space is never materialized.

Index convention for ``R``: entry ``R[i*d+j][k*d+l]`` is the weight of an
upward crossing with top-left edge ``i``, top-right ``j``, bottom-left ``k``
and bottom-right ``l``.  For a positive crossing the over-strand runs from
bottom-left to top-right; for a negative crossing the matrix inverse of ``R``
is used and the over-strand runs from bottom-right to top-left.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import DElement, r_matrix, rotation_element
from .diagram import Crossing, RotDecomp
from .errors import CapsMismatch, DimensionMismatch, NotInvertible
from .series import Caps, ScalarSeries

Matrix = list[list[ScalarSeries]]


# ---------------------------------------------------------------------------
# matrices over the scalar ring

def matrix_identity(caps: Caps, d: int) -> Matrix:
    return [
        [ScalarSeries.one(caps) if r == c else ScalarSeries.zero(caps) for c in range(d)]
        for r in range(d)
    ]


def matrix_mul(A: Matrix, B: Matrix) -> Matrix:
    n, mid, m = len(A), len(B), len(B[0])
    out = []
    for r in range(n):
        row = []
        for c in range(m):
            acc = ScalarSeries.zero(A[0][0].caps)
            for k in range(mid):
                ark = A[r][k]
                if ark.is_zero():
                    continue
                acc = acc + ark * B[k][c]
            row.append(acc)
        out.append(row)
    return out


def matrix_add(A: Matrix, B: Matrix) -> Matrix:
    return [[A[r][c] + B[r][c] for c in range(len(A[0]))] for r in range(len(A))]


def matrix_scale(A: Matrix, s) -> Matrix:
    return [[entry * s for entry in row] for row in A]


def matrix_eq(A: Matrix, B: Matrix) -> bool:
    return all(A[r][c] == B[r][c] for r in range(len(A)) for c in range(len(A[0])))


def _constant_inverse(A: Matrix) -> list[list[Fraction]]:
    """Exact inverse of the constant-term matrix by Gaussian elimination."""
    n = len(A)
    work = [[A[r][c].constant_term for c in range(n)] + [Fraction(int(r == c)) for c in range(n)]
            for r in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col]), None)
        if pivot is None:
            raise NotInvertible("constant term of matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv = Fraction(1) / work[col][col]
        work[col] = [v * inv for v in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                factor = work[r][col]
                work[r] = [v - factor * p for v, p in zip(work[r], work[col])]
    return [row[n:] for row in work]


def matrix_inverse(A: Matrix) -> Matrix:
    """Series inverse: invert the constant term exactly, then correct order by order."""
    caps = A[0][0].caps
    n = len(A)
    const_inv = _constant_inverse(A)
    M0inv = [[ScalarSeries.term(caps, v) for v in row] for row in const_inv]
    # A = M0 (I + M0^-1 (A - M0)); the correction is nilpotent within caps.
    correction = matrix_mul(M0inv, A)
    for r in range(n):
        correction[r][r] = correction[r][r] - ScalarSeries.one(caps)
    out = matrix_identity(caps, n)
    power = matrix_identity(caps, n)
    for _ in range(caps.eps_order + caps.hbar_order + 1):
        power = matrix_mul(power, correction)
        if all(entry.is_zero() for row in power for entry in row):
            break
        out = matrix_add(out, matrix_scale(power, Fraction(-1)))
        power = matrix_scale(power, Fraction(-1))
    return matrix_mul(out, M0inv)


# ---------------------------------------------------------------------------
# representation data

class RepData:
    """Matrix data of a finite-dimensional representation at fixed caps."""

    def __init__(self, dim: int, R: Matrix, h: Matrix, h_inv: Matrix):
        if dim < 1:
            raise DimensionMismatch("dimension must be positive")
        caps = h[0][0].caps
        if len(R) != dim * dim or any(len(row) != dim * dim for row in R):
            raise DimensionMismatch("R must be d^2 x d^2")
        if len(h) != dim or len(h_inv) != dim:
            raise DimensionMismatch("h and h_inv must be d x d")
        if not matrix_eq(matrix_mul(h, h_inv), matrix_identity(caps, dim)):
            raise DimensionMismatch("h * h_inv must be the identity")
        if not all(e.caps == caps for M in (R, h, h_inv) for row in M for e in row):
            raise CapsMismatch("all rep matrices must share one caps")
        self.dim = dim
        self.caps = caps
        self.R = R
        self.h = h
        self.h_inv = h_inv
        self._r_inv: Matrix | None = None

    def r_inverse(self) -> Matrix:
        if self._r_inv is None:
            self._r_inv = matrix_inverse(self.R)
        return self._r_inv

    def to_json(self) -> dict:
        def enc(M):
            return [[entry.to_json() for entry in row] for row in M]

        return {
            "dim": self.dim,
            "caps": {"eps_order": self.caps.eps_order, "hbar_order": self.caps.hbar_order},
            "R": enc(self.R),
            "h": enc(self.h),
            "h_inv": enc(self.h_inv),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RepData":
        caps = Caps(data["caps"]["eps_order"], data["caps"]["hbar_order"])

        def dec(M):
            return [[ScalarSeries.from_json(caps, entry) for entry in row] for row in M]

        h = dec(data["h"])
        h_inv = dec(data["h_inv"]) if "h_inv" in data else matrix_inverse(h)
        return cls(int(data["dim"]), dec(data["R"]), h, h_inv)


@dataclass
class EndpointVectors:
    """Generic endpoint contractions: eta enters at the leg, eps_ leaves at the head."""

    eta: list[ScalarSeries]
    eps_: list[ScalarSeries]

    @classmethod
    def standard(cls, caps: Caps, dim: int, slot: int = 0) -> "EndpointVectors":
        eta = [ScalarSeries.term(caps, int(i == slot)) for i in range(dim)]
        eps_ = [ScalarSeries.term(caps, int(i == slot)) for i in range(dim)]
        return cls(eta, eps_)

    def to_json(self) -> dict:
        return {
            "eta": [v.to_json() for v in self.eta],
            "eps": [v.to_json() for v in self.eps_],
        }

    @classmethod
    def from_json(cls, caps: Caps, data: dict) -> "EndpointVectors":
        return cls(
            [ScalarSeries.from_json(caps, v) for v in data["eta"]],
            [ScalarSeries.from_json(caps, v) for v in data["eps"]],
        )


def load_rep_json(data: dict) -> tuple[RepData, EndpointVectors]:
    rep = RepData.from_json(data)
    ev = EndpointVectors.from_json(rep.caps, {"eta": data["eta"], "eps": data["eps"]})
    if len(ev.eta) != rep.dim or len(ev.eps_) != rep.dim:
        raise DimensionMismatch("endpoint vectors must have length dim")
    return rep, ev


# ---------------------------------------------------------------------------
# state-sum evaluation by sequential contraction

def rt_evaluate(d: RotDecomp, rep: RepData, ev: EndpointVectors) -> ScalarSeries:
    """State sum over edge labelings, contracted along the strand."""
    if len(ev.eta) != rep.dim or len(ev.eps_) != rep.dim:
        raise DimensionMismatch("endpoint vectors must have length dim")
    caps = rep.caps
    dim = rep.dim
    plan: dict[int, tuple] = {}
    for tok in d.tokens:
        if isinstance(tok, Crossing):
            first, second = sorted((tok.over, tok.under))
            plan[first] = ("open", tok)
            plan[second] = ("close", tok)
        else:
            plan[tok.label] = ("rot", tok)
    token_ids = {id(tok): n for n, tok in enumerate(d.tokens)}

    def weight(tok: Crossing, i, j, k, l) -> ScalarSeries:
        M = rep.R if tok.sign > 0 else rep.r_inverse()
        return M[i * dim + j][k * dim + l]

    # state: (current edge index, pending tuple of (cid, enter_idx, exit_idx))
    states: dict[tuple, ScalarSeries] = {}
    for idx, amp in enumerate(ev.eta):
        if not amp.is_zero():
            states[(idx, ())] = amp

    for label in range(1, d.labels + 1):
        action = plan.get(label)
        if action is None:
            continue
        kind, tok = action
        new_states: dict[tuple, ScalarSeries] = {}

        def bump(key, amp):
            if amp.is_zero():
                return
            cur = new_states.get(key)
            new_states[key] = amp if cur is None else cur + amp

        if kind == "rot":
            M = rep.h_inv if tok.sign > 0 else rep.h
            for (cur, pending), amp in states.items():
                for out in range(dim):
                    bump((out, pending), amp * M[out][cur])
        elif kind == "open":
            cid = token_ids[id(tok)]
            over_first = tok.over < tok.under
            for (cur, pending), amp in states.items():
                for out in range(dim):
                    for enter in range(dim):
                        for exit_ in range(dim):
                            if tok.sign > 0:
                                if over_first:
                                    # walk enters bottom-left, exits top-right
                                    w = weight(tok, exit_, out, cur, enter)
                                else:
                                    # under-pass first: enters bottom-right, exits top-left
                                    w = weight(tok, out, exit_, enter, cur)
                            else:
                                if over_first:
                                    # negative over-pass: enters bottom-right, exits top-left
                                    w = weight(tok, out, exit_, enter, cur)
                                else:
                                    w = weight(tok, exit_, out, cur, enter)
                            if w.is_zero():
                                continue
                            key = (out, tuple(sorted(pending + ((cid, enter, exit_),))))
                            bump(key, amp * w)
        else:  # close
            cid = token_ids[id(tok)]
            for (cur, pending), amp in states.items():
                match = [p for p in pending if p[0] == cid]
                if not match:
                    continue
                _, enter, exit_ = match[0]
                if enter != cur:
                    continue
                rest = tuple(p for p in pending if p[0] != cid)
                bump((exit_, rest), amp)
        states = new_states

    total = ScalarSeries.zero(caps)
    for (cur, pending), amp in states.items():
        if pending:
            continue
        total = total + amp * ev.eps_[cur]
    return total


# ---------------------------------------------------------------------------
# deriving rep data from generator matrices, and the recovery cross-check

def matrix_of_element(element: DElement, rho: dict[str, Matrix]) -> Matrix:
    """Apply a generator-matrix assignment to a normal-form element."""
    caps = element.caps
    dim = len(rho["y"])
    powers: dict[str, list[Matrix]] = {}

    def power(name: str, exp: int) -> Matrix:
        cache = powers.setdefault(name, [matrix_identity(caps, dim)])
        while len(cache) <= exp:
            cache.append(matrix_mul(cache[-1], rho[name]))
        return cache[exp]

    out = [[ScalarSeries.zero(caps) for _ in range(dim)] for _ in range(dim)]
    for mon, coeff in element.terms.items():
        M = power("y", mon[0])
        for name, exp in zip("bax", mon[1:]):
            if exp:
                M = matrix_mul(M, power(name, exp))
        for r in range(dim):
            for c in range(dim):
                if not M[r][c].is_zero():
                    out[r][c] = out[r][c] + coeff * M[r][c]
    return out


def derive_rep(caps: Caps, rho: dict[str, Matrix]) -> RepData:
    """Build crossing and rotation weights from generator matrices.

    The crossing matrix entry for top indices (i, j) and bottom indices (k, l)
    is the sum over the quasitriangular terms of rho(first)[j][k] *
    rho(second)[i][l]; the rotation weight is the image of the clockwise
    rotation element.
    """
    dim = len(rho["y"])
    rmat = r_matrix(caps)
    R = [[ScalarSeries.zero(caps) for _ in range(dim * dim)] for _ in range(dim * dim)]
    for (m1, m2), coeff in rmat.terms.items():
        A = matrix_of_element(DElement.monomial(caps, m1), rho)
        B = matrix_of_element(DElement.monomial(caps, m2), rho)
        for i in range(dim):
            for j in range(dim):
                for k in range(dim):
                    for l in range(dim):
                        inc = coeff * A[j][k] * B[i][l]
                        if not inc.is_zero():
                            R[i * dim + j][k * dim + l] = R[i * dim + j][k * dim + l] + inc
    h = matrix_of_element(rotation_element(-1, caps), rho)
    h_inv = matrix_of_element(rotation_element(1, caps), rho)
    return RepData(dim, R, h, h_inv)


@dataclass(frozen=True)
class RecoveryResult:
    passed: bool
    details: str = ""


def recovery_check(
    d: RotDecomp, rep: RepData, rho: dict[str, Matrix], ev: EndpointVectors
) -> RecoveryResult:
    """Check that the state sum equals the contracted universal invariant.

    The left side is :func:`rt_evaluate`; the right side applies the generator
    matrices to the universal invariant of the decomposition and contracts
    with the endpoint vectors.  Exact equality is required.
    """
    from .invariant import evaluate_Z

    state_sum = rt_evaluate(d, rep, ev)
    universal = evaluate_Z(d, rep.caps)
    M = matrix_of_element(universal.element, rho)
    contracted = ScalarSeries.zero(rep.caps)
    for r in range(rep.dim):
        for c in range(rep.dim):
            contracted = contracted + ev.eps_[r] * M[r][c] * ev.eta[c]
    if state_sum == contracted:
        return RecoveryResult(True)
    return RecoveryResult(
        False,
        f"state sum {state_sum.render()} != contracted universal value {contracted.render()}",
    )
