"""Evaluation of the universal invariant of a biframed planar knotoid.

The input is a rotational tangle decomposition: the strand is walked through
its labeled segments in ascending order, every crossing deposits the two
tensor factors of the (inverse) quasitriangular structure on its over- and
under-segment, every rotation token deposits a rotation element, and the
deposits are multiplied together in walk order.

The evaluator enumerates crossing contributions under a global h-degree
budget: a crossing term of internal degree d carries an explicit factor
hbar^d, so any combination whose total budget exceeds the cap dies by scalar
truncation and is pruned.  The number of admissible combinations grows
polynomially in the crossing count at fixed caps.

Evaluation is a pure function; repeated runs give identical results
independent of term scheduling because coefficient arithmetic is exact.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    DElement,
    EDict,
    Mon,
    UNIT_MON,
    _eadd_into,
    get_context,
    r_inverse,
    r_matrix,
    rotation_element,
)
from .diagram import Crossing, RotDecomp, Rotation
from .errors import CapsMismatch, DegreeOutOfRange, InvalidDecomposition
from .series import Caps, _smul

# Diagram-reading conventions.  Fixed so that inserted crossing/rotation pairs
# cancel, reversal is implemented by the antipode, and the evaluator
# reproduces the published closed forms for the five-crossing examples.
#
#   NEW_FACTOR_ON_LEFT: an element encountered later on the walk multiplies
#       the running product on the left.
#   OVER_GETS_FIRST_SLOT: the over-strand receives the first tensor factor of
#       the (inverse) quasitriangular structure.
NEW_FACTOR_ON_LEFT = True
OVER_GETS_FIRST_SLOT = True


@dataclass(frozen=True)
class InvariantValue:
    """A computed invariant: normal-form element plus input fingerprint."""

    element: DElement
    caps: Caps
    fingerprint: str

    def render(self) -> str:
        return self.element.render()

    def to_json(self) -> dict:
        data = self.element.to_json()
        data["fingerprint"] = self.fingerprint
        return data


def _decomposition_fingerprint(d: RotDecomp, caps: Caps) -> str:
    text = f"{d.render()}@eps{caps.eps_order},hbar{caps.hbar_order}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


_TERMS_CACHE: dict = {}


def _crossing_terms(caps: Caps):
    """Per-sign crossing deposits: lists of (over_mon, under_mon, scalar)."""
    key = (caps.eps_order, caps.hbar_order)
    hit = _TERMS_CACHE.get(key)
    if hit is not None:
        return hit
    out = {}
    for sign, tensor in ((1, r_matrix(caps)), (-1, r_inverse(caps))):
        terms = []
        for (m1, m2), sd in tensor.raw().items():
            over, under = (m1, m2) if OVER_GETS_FIRST_SLOT else (m2, m1)
            terms.append((over, under, sd))
        out[sign] = terms
    _TERMS_CACHE[key] = out
    return out


def evaluate_Z(d: RotDecomp, caps: Caps) -> InvariantValue:
    """Universal invariant of the decomposition at the given caps."""
    ctx = get_context(caps)
    plan: dict[int, tuple] = {}
    for tok in d.tokens:
        if isinstance(tok, Crossing):
            first, second = sorted((tok.over, tok.under))
            plan[first] = ("open", tok)
            plan[second] = ("close", tok)
        elif isinstance(tok, Rotation):
            plan[tok.label] = ("rot", tok)
        else:  # pragma: no cover - RotDecomp already validates
            raise InvalidDecomposition(f"unknown token {tok!r}")

    crossing_terms = _crossing_terms(caps)
    rot_raw = {s: rotation_element(s, caps).raw() for s in (1, -1)}

    def mul_into(acc: EDict, factor_mon: Mon, main_mon: Mon, scal) -> None:
        if NEW_FACTOR_ON_LEFT:
            prod = ctx.mon_mul(factor_mon, main_mon)
        else:
            prod = ctx.mon_mul(main_mon, factor_mon)
        _eadd_into(acc, prod, scal, ctx.K, ctx.N)

    # state: pending tuple of (crossing token id, monomial) -> main element
    states: dict[tuple, EDict] = {(): {UNIT_MON: {(0, 0): Fraction(1)}}}
    token_ids = {id(tok): n for n, tok in enumerate(d.tokens)}

    for label in range(1, d.labels + 1):
        action = plan.get(label)
        if action is None:
            continue
        kind, tok = action
        new_states: dict[tuple, EDict] = {}
        if kind == "rot":
            factor = rot_raw[tok.sign]
            for pending, main in states.items():
                acc = new_states.setdefault(pending, {})
                for fmon, fsd in factor.items():
                    for mmon, msd in main.items():
                        scal = _smul(fsd, msd, ctx.K, ctx.N)
                        if scal:
                            mul_into(acc, fmon, mmon, scal)
        elif kind == "open":
            cid = token_ids[id(tok)]
            over_first = tok.over < tok.under
            for over_mon, under_mon, tsd in crossing_terms[tok.sign]:
                now_mon, pend_mon = (
                    (over_mon, under_mon) if over_first else (under_mon, over_mon)
                )
                entry = (cid, pend_mon)
                for pending, main in states.items():
                    new_pending = tuple(sorted(pending + (entry,)))
                    acc = new_states.setdefault(new_pending, {})
                    for mmon, msd in main.items():
                        scal = _smul(tsd, msd, ctx.K, ctx.N)
                        if scal:
                            mul_into(acc, now_mon, mmon, scal)
        else:  # close
            cid = token_ids[id(tok)]
            for pending, main in states.items():
                match = [entry for entry in pending if entry[0] == cid]
                if not match:
                    raise InvalidDecomposition(
                        f"crossing closes at label {label} without being open"
                    )
                pend_mon = match[0][1]
                rest = tuple(entry for entry in pending if entry[0] != cid)
                acc = new_states.setdefault(rest, {})
                for mmon, msd in main.items():
                    mul_into(acc, pend_mon, mmon, msd)
        states = {p: m for p, m in new_states.items() if m}
        if not states:
            states = {(): {}}
            break

    leftover = [p for p in states if p]
    if leftover:
        raise InvalidDecomposition("crossing opened but never closed")
    element = DElement(caps, states.get((), {}), _trusted=True)
    return InvariantValue(element, caps, _decomposition_fingerprint(d, caps))


# ---------------------------------------------------------------------------
# comparison

@dataclass(frozen=True)
class Comparison:
    equal: bool
    witness: tuple[Mon, int, int] | None = None
    left_coeff: Fraction | None = None
    right_coeff: Fraction | None = None

    def describe(self) -> str:
        if self.equal:
            return "Equal"
        mon, e, h = self.witness
        return (
            f"Differ at monomial y^{mon[0]} b^{mon[1]} a^{mon[2]} x^{mon[3]}, "
            f"eps^{e} hbar^{h}: {self.left_coeff} vs {self.right_coeff}"
        )


def compare(a: InvariantValue, b: InvariantValue) -> Comparison:
    """Exact coefficient comparison; reports the lowest-degree mismatch.

    Witness order: e-degree first, then h-degree, then monomial degree.
    """
    if a.caps != b.caps:
        raise CapsMismatch(f"{a.caps} vs {b.caps}")
    left, right = a.element.raw(), b.element.raw()
    keys = set()
    for terms in (left, right):
        for mon, sd in terms.items():
            for (e, h) in sd:
                keys.add((e, h, sum(mon), mon))
    for e, h, _, mon in sorted(keys):
        lc = left.get(mon, {}).get((e, h), Fraction(0))
        rc = right.get(mon, {}).get((e, h), Fraction(0))
        if lc != rc:
            return Comparison(False, (mon, e, h), lc, rc)
    return Comparison(True)


def epsilon_coefficient(value: InvariantValue, k: int) -> DElement:
    """The part of the invariant of exact e-degree ``k``."""
    if k < 0 or k > value.caps.eps_order:
        raise DegreeOutOfRange(f"eps degree {k} outside caps {value.caps}")
    return value.element.epsilon_part(k)
