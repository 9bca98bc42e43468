"""Knottedness statistics of open 3D curves by randomized projection.

A polygonal open curve is projected along a direction drawn uniformly from the
sphere; the projection yields a knotoid diagram (an oriented Gauss code plus a
rotational decomposition with turning-derived rotation tokens), which is
greedily simplified and tallied.  Directions whose projection hits one of the
measure-zero bad configurations (near-parallel overlaps, endpoint grazing,
triple points, crossings near vertices, ambiguous turning) are rejected and
counted.

Geometry runs in double precision with explicit tolerances; class tallies and
invariant averages use exact rational arithmetic, so estimates are bit-stable
across runs and platforms.  Direction sampling uses a counter-based 64-bit
mixer, so sample ``i`` depends only on ``(seed, i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .diagram import (
    Biframing,
    Crossing,
    OrientedGaussCode,
    RotDecomp,
    Rotation,
    writhe,
)
from .errors import (
    AllSamplesDegenerate,
    ArcOutOfRange,
    DegenerateDirection,
    DuplicateConsecutivePoint,
    EmptyEstimate,
    ParseError,
    TooFewPoints,
)
from .series import Caps

Vec3 = tuple[float, float, float]
Vec2 = tuple[float, float]

TRIVIAL_CLASS = "trivial"

# rounding guard for turning angles and winding numbers, in units of the
# geometric tolerance
ANGLE_GUARD_FACTOR = 1e3


# ---------------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class OpenCurve3D:
    points: tuple[Vec3, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise TooFewPoints("a curve needs at least two points")
        for p, q in zip(self.points, self.points[1:]):
            if p == q:
                raise DuplicateConsecutivePoint(f"repeated consecutive point {p}")

    def translated(self, offset: Vec3) -> "OpenCurve3D":
        ox, oy, oz = offset
        return OpenCurve3D(tuple((x + ox, y + oy, z + oz) for x, y, z in self.points))


def builtin_curve_path(name: str = "open_trefoil") -> str:
    """Filesystem path of a bundled example curve."""
    from importlib.resources import files

    resource = files("knotoidal").joinpath(f"data/{name}.xyz")
    return str(resource)


def load_curve(path) -> OpenCurve3D:
    """Load an ``x y z`` per-line text file; blank lines and # comments allowed."""
    points = []
    with open(path) as handle:
        for lineno, line in enumerate(handle, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected three coordinates")
            try:
                points.append(tuple(float(p) for p in parts))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad float") from None
    if len(points) < 2:
        raise TooFewPoints(f"{path}: a curve needs at least two points")
    return OpenCurve3D(tuple(points))


# ---------------------------------------------------------------------------
# deterministic direction sampling

_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def rand64(seed: int, index: int) -> int:
    """Counter-based stream: value depends only on (seed, index)."""
    return _mix64((seed & _MASK64) + (index + 1) * 0x9E3779B97F4A7C15 & _MASK64)


def _unit_float(word: int) -> float:
    return (word >> 11) * (1.0 / (1 << 53))


def sample_direction(seed: int, index: int) -> Vec3:
    """Uniform direction on the sphere: z uniform in [-1, 1], angle uniform."""
    z = 2.0 * _unit_float(rand64(seed, 2 * index)) - 1.0
    theta = 2.0 * math.pi * _unit_float(rand64(seed, 2 * index + 1))
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return (r * math.cos(theta), r * math.sin(theta), z)


def sample_directions(seed: int, n: int) -> list[Vec3]:
    return [sample_direction(seed, i) for i in range(n)]


# ---------------------------------------------------------------------------
# projection

@dataclass(frozen=True)
class ProjectionResult:
    direction: Vec3
    code: OrientedGaussCode
    planar_points: tuple[Vec2, ...]
    decomp: RotDecomp
    biframing: Biframing


def _cross3(u: Vec3, v: Vec3) -> Vec3:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _plane_basis(v: Vec3) -> tuple[Vec3, Vec3]:
    axes = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    helper = min(axes, key=lambda ax: abs(ax[0] * v[0] + ax[1] * v[1] + ax[2] * v[2]))
    e1 = _cross3(helper, v)
    norm = math.sqrt(sum(c * c for c in e1))
    e1 = tuple(c / norm for c in e1)
    e2 = _cross3(v, e1)
    return e1, e2


def _wrap_angle(delta: float) -> float:
    while delta <= -math.pi:
        delta += 2.0 * math.pi
    while delta > math.pi:
        delta -= 2.0 * math.pi
    return delta


def _point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    length2 = dx * dx + dy * dy
    if length2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def project(curve: OpenCurve3D, direction: Vec3, tol: float) -> ProjectionResult:
    """Project along ``direction`` and extract the knotoid diagram.

    Raises :class:`DegenerateDirection` for the measure-zero bad directions;
    callers sampling the sphere catch it and count a rejection.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    norm = math.sqrt(sum(c * c for c in direction))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector within 1e-12")
    e1, e2 = _plane_basis(direction)
    pts2 = tuple(
        (
            p[0] * e1[0] + p[1] * e1[1] + p[2] * e1[2],
            p[0] * e2[0] + p[1] * e2[1] + p[2] * e2[2],
        )
        for p in curve.points
    )
    depth = tuple(
        p[0] * direction[0] + p[1] * direction[1] + p[2] * direction[2]
        for p in curve.points
    )
    nseg = len(pts2) - 1

    # a 3D segment parallel to the view direction projects to a point (cusp)
    for i in range(nseg):
        a1, a2 = pts2[i], pts2[i + 1]
        if math.hypot(a2[0] - a1[0], a2[1] - a1[1]) < tol:
            raise DegenerateDirection("segment parallel to view direction")

    # segment-pair intersections
    events = []  # (segment index, parameter, crossing record)
    crossings = []  # dicts with point, segments, params
    for i in range(nseg):
        a1, a2 = pts2[i], pts2[i + 1]
        da = (a2[0] - a1[0], a2[1] - a1[1])
        la = math.hypot(*da)
        for j in range(i + 1, nseg):
            b1, b2 = pts2[j], pts2[j + 1]
            db = (b2[0] - b1[0], b2[1] - b1[1])
            lb = math.hypot(*db)
            denom = da[0] * db[1] - da[1] * db[0]
            rhs = (b1[0] - a1[0], b1[1] - a1[1])
            if abs(denom) <= tol * la * lb:
                if j == i + 1:
                    # straight continuation through the shared vertex is
                    # harmless; a fold-back is caught by the cusp guard below
                    continue
                # near-parallel: reject only if the lines nearly overlap
                gap = min(
                    _point_segment_distance(b1, a1, a2),
                    _point_segment_distance(b2, a1, a2),
                    _point_segment_distance(a1, b1, b2),
                    _point_segment_distance(a2, b1, b2),
                )
                if gap < tol:
                    raise DegenerateDirection("near-parallel segment overlap")
                continue
            t = (rhs[0] * db[1] - rhs[1] * db[0]) / denom
            s = (rhs[0] * da[1] - rhs[1] * da[0]) / denom
            margin_t = tol / max(la, tol)
            margin_s = tol / max(lb, tol)
            if t < -margin_t or t > 1 + margin_t or s < -margin_s or s > 1 + margin_s:
                continue
            if j == i + 1:
                # adjacent segments meet at their shared vertex or overlap;
                # a genuine interior crossing is impossible
                continue
            if (
                t < margin_t
                or t > 1 - margin_t
                or s < margin_s
                or s > 1 - margin_s
            ):
                raise DegenerateDirection("crossing within tol of a vertex")
            za = depth[i] + t * (depth[i + 1] - depth[i])
            zb = depth[j] + s * (depth[j + 1] - depth[j])
            if abs(za - zb) < tol:
                raise DegenerateDirection("depth tie at crossing")
            point = (a1[0] + t * da[0], a1[1] + t * da[1])
            crossings.append(
                {"point": point, "i": i, "t": t, "j": j, "s": s, "za": za, "zb": zb}
            )

    # triple-point proxy: two crossing points too close together
    for m in range(len(crossings)):
        for n in range(m + 1, len(crossings)):
            pm, pn = crossings[m]["point"], crossings[n]["point"]
            if math.hypot(pm[0] - pn[0], pm[1] - pn[1]) < tol:
                raise DegenerateDirection("two crossings within tol (triple point)")

    # endpoint grazing another strand
    for endpoint, skip in ((pts2[0], {0}), (pts2[-1], {nseg - 1})):
        for i in range(nseg):
            if i in skip:
                continue
            if _point_segment_distance(endpoint, pts2[i], pts2[i + 1]) < tol:
                raise DegenerateDirection("endpoint within tol of a strand")

    for rec in crossings:
        events.append((rec["i"], rec["t"], rec))
        events.append((rec["j"], rec["s"], rec))
    events.sort(key=lambda ev: (ev[0], ev[1]))

    # crossing ids in order of first traversal; roles and signs
    ids: dict[int, int] = {}
    passes = []
    signs = {}
    for seg, par, rec in events:
        if id(rec) not in ids:
            ids[id(rec)] = len(ids) + 1
        cid = ids[id(rec)]
        on_first = seg == rec["i"] and par == rec["t"]
        my_depth, other_depth = (
            (rec["za"], rec["zb"]) if on_first else (rec["zb"], rec["za"])
        )
        role = "over" if my_depth > other_depth else "under"
        passes.append((cid, role))
        if cid not in signs:
            di = (
                pts2[rec["i"] + 1][0] - pts2[rec["i"]][0],
                pts2[rec["i"] + 1][1] - pts2[rec["i"]][1],
            )
            dj = (
                pts2[rec["j"] + 1][0] - pts2[rec["j"]][0],
                pts2[rec["j"] + 1][1] - pts2[rec["j"]][1],
            )
            over_dir, under_dir = (di, dj) if rec["za"] > rec["zb"] else (dj, di)
            cross = over_dir[0] * under_dir[1] - over_dir[1] * under_dir[0]
            signs[cid] = 1 if cross > 0 else -1
    code = OrientedGaussCode(passes, signs)

    # continuous tangent-angle lift along the polyline
    seg_dirs = [
        (pts2[i + 1][0] - pts2[i][0], pts2[i + 1][1] - pts2[i][1]) for i in range(nseg)
    ]
    angle_guard = tol * ANGLE_GUARD_FACTOR
    lifted = [math.atan2(seg_dirs[0][1], seg_dirs[0][0])]
    for prev, cur in zip(seg_dirs, seg_dirs[1:]):
        delta = _wrap_angle(
            math.atan2(cur[1], cur[0]) - math.atan2(prev[1], prev[0])
        )
        if abs(abs(delta) - math.pi) < angle_guard:
            raise DegenerateDirection("projection folds back (cusp)")
        lifted.append(lifted[-1] + delta)

    def snap(angle: float, anchor: float) -> int:
        turns = (angle - anchor) / (2.0 * math.pi)
        nearest = round(turns)
        if abs(abs(turns - nearest) - 0.5) < angle_guard / (2.0 * math.pi):
            raise DegenerateDirection("turning ambiguous at half rotation")
        return int(nearest)

    # Integer turn marks per event.  The first pass of each crossing and the
    # leg snap against the upward direction; the partner pass of a crossing
    # and the head anchor to their partner's residual direction instead, so
    # that a rounding flip only ever happens for a crossing as a whole (a
    # full-crossing rotation) or for both endpoints together (a matched pair
    # of endpoint twists).  Both are invariances of the evaluated invariant;
    # independent per-pass rounding would not be.
    leg_mark = snap(lifted[0], 0.5 * math.pi)
    leg_residual = lifted[0] - 2.0 * math.pi * leg_mark
    first_residual: dict[int, float] = {}
    marks = [leg_mark]
    for seg, _par, rec in events:
        angle = lifted[seg]
        partner = first_residual.get(id(rec))
        if partner is None:
            mark = snap(angle, 0.5 * math.pi)
            first_residual[id(rec)] = angle - 2.0 * math.pi * mark
        else:
            mark = snap(angle, partner)
        marks.append(mark)
    marks.append(snap(lifted[-1], leg_residual))

    # assemble decomposition: rotation tokens fill the gaps between passes
    tokens = []
    pass_labels = []
    next_label = 1
    for gap in range(len(events) + 1):
        spin = marks[gap + 1] - marks[gap]
        step = 1 if spin > 0 else -1
        for _ in range(abs(spin)):
            tokens.append(Rotation(step, next_label))
            next_label += 1
        if gap < len(events):
            pass_labels.append(next_label)
            next_label += 1
    by_rec: dict[int, list[int]] = {}
    for (seg, par, rec), label in zip(events, pass_labels):
        by_rec.setdefault(id(rec), []).append(label)
    for rec in crossings:
        rec_passes = by_rec[id(rec)]
        cid = ids[id(rec)]
        # identify which pass is over from the recorded roles
        roles = [p[1] for p, lab in zip(passes, pass_labels) if lab in rec_passes]
        over_label = rec_passes[0] if roles[0] == "over" else rec_passes[1]
        under_label = rec_passes[1] if roles[0] == "over" else rec_passes[0]
        tokens.append(Crossing(signs[cid], over_label, under_label))
    labels = max(next_label - 1, 1)
    decomp = RotDecomp(labels, tokens)

    # coframing from winding numbers around the projected endpoints
    def winding(center: Vec2, pts) -> int:
        total = 0.0
        prev = None
        for p in pts:
            vec = (p[0] - center[0], p[1] - center[1])
            if vec == (0.0, 0.0):
                raise DegenerateDirection("winding center on the path")
            ang = math.atan2(vec[1], vec[0])
            if prev is not None:
                total += _wrap_angle(ang - prev)
            prev = ang
        return int(round(total / (2.0 * math.pi)))

    n0 = winding(pts2[0], pts2[1:])
    n1 = winding(pts2[-1], pts2[:-1])
    biframing = Biframing(writhe(code), n0 - n1)
    return ProjectionResult(direction, code, pts2, decomp, biframing)


# ---------------------------------------------------------------------------
# greedy Gauss-code simplification (only removing moves; endpoints never cross
# a strand, so the forbidden moves are never applied)

def _try_r1(passes, signs):
    for idx in range(len(passes) - 1):
        if passes[idx][0] == passes[idx + 1][0]:
            cid = passes[idx][0]
            new_passes = passes[:idx] + passes[idx + 2 :]
            new_signs = {k: v for k, v in signs.items() if k != cid}
            return new_passes, new_signs
    return None


def _try_r2(passes, signs):
    adjacency: dict[frozenset, list[int]] = {}
    for idx in range(len(passes) - 1):
        (c1, _), (c2, _) = passes[idx], passes[idx + 1]
        if c1 == c2:
            continue
        adjacency.setdefault(frozenset((c1, c2)), []).append(idx)
    for pair, positions in adjacency.items():
        if len(positions) < 2:
            continue
        c1, c2 = tuple(pair)
        if signs[c1] == signs[c2]:
            continue
        for pos_a in positions:
            roles_a = {passes[pos_a][1], passes[pos_a + 1][1]}
            if len(roles_a) != 1:
                continue
            for pos_b in positions:
                if pos_b <= pos_a:
                    continue
                if pos_b == pos_a + 1:
                    continue
                roles_b = {passes[pos_b][1], passes[pos_b + 1][1]}
                if len(roles_b) != 1 or roles_a == roles_b:
                    continue
                drop = {pos_a, pos_a + 1, pos_b, pos_b + 1}
                new_passes = [p for n, p in enumerate(passes) if n not in drop]
                new_signs = {k: v for k, v in signs.items() if k not in pair}
                return new_passes, new_signs
    return None


def simplify_gauss(code: OrientedGaussCode) -> OrientedGaussCode:
    """Greedy monotone reduction: remove kinks and opposite-sign bigons.

    Sound (each removal is a diagram move on realizable codes) but not
    complete; the crossing count strictly decreases every step.
    """
    passes = list(code.passes)
    signs = dict(code.signs)
    while True:
        hit = _try_r1(passes, signs) or _try_r2(passes, signs)
        if hit is None:
            break
        passes, signs = hit
    return OrientedGaussCode(passes, signs).relabeled()


def class_label(code: OrientedGaussCode) -> str:
    """Canonical class key of a simplified code."""
    simplified = simplify_gauss(code)
    return TRIVIAL_CLASS if simplified.is_empty() else simplified.render()


# ---------------------------------------------------------------------------
# the estimator

@dataclass(frozen=True)
class MeasureEstimate:
    samples: int
    seed: int
    class_freq: dict[str, Fraction]
    invariant_mean: dict | None
    rejected: int

    @property
    def accepted(self) -> int:
        return self.samples - self.rejected

    def to_json(self) -> dict:
        freq = {
            label: {"fraction": str(f), "float": float(f)}
            for label, f in sorted(self.class_freq.items())
        }
        data = {
            "samples": self.samples,
            "seed": self.seed,
            "rejected": self.rejected,
            "accepted": self.accepted,
            "class_freq": freq,
        }
        if self.invariant_mean is not None:
            data["invariant_mean"] = self.invariant_mean
        return data

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        lines = ["class,count,frequency"]
        for label, freq in sorted(self.class_freq.items()):
            count = freq.numerator * self.accepted // freq.denominator
            lines.append(f'"{label}",{count},{float(freq)!r}')
        return "\n".join(lines) + "\n"


def _estimate_with_directions(curve, directions, tol, phi, caps):
    from .invariant import evaluate_Z

    tallies: dict[str, int] = {}
    rejected = 0
    zsums: dict[tuple, Fraction] = {}
    for direction in directions:
        try:
            proj = project(curve, direction, tol)
        except DegenerateDirection:
            rejected += 1
            continue
        label = class_label(proj.code)
        tallies[label] = tallies.get(label, 0) + 1
        if phi == "zmean":
            value = evaluate_Z(proj.decomp, caps)
            part = value.element.epsilon_part(1)
            for mon, sd in part.raw().items():
                for (e, h), coeff in sd.items():
                    key = (mon, h)
                    zsums[key] = zsums.get(key, Fraction(0)) + coeff
    accepted = sum(tallies.values())
    if accepted == 0:
        raise AllSamplesDegenerate("every sampled direction was degenerate")
    freq = {label: Fraction(count, accepted) for label, count in tallies.items()}
    mean = None
    if phi == "zmean":
        mean = {
            "caps": {"eps_order": caps.eps_order, "hbar_order": caps.hbar_order},
            "eps_degree": 1,
            "components": [
                {
                    "monomial": list(mon),
                    "hbar": h,
                    "mean": str(total / accepted),
                }
                for (mon, h), total in sorted(zsums.items())
            ],
        }
    return tallies, freq, mean, rejected


def estimate_measure(
    curve: OpenCurve3D,
    n: int,
    seed: int = 0,
    tol: float = 1e-9,
    phi: str = "classes",
    caps: Caps | None = None,
) -> MeasureEstimate:
    """Empirical class frequencies (and optionally invariant means) over
    ``n`` uniformly sampled projection directions."""
    if n < 1:
        raise ValueError("need at least one sample")
    if phi not in ("classes", "zmean"):
        raise ValueError(f"unknown phi {phi!r}")
    if phi == "zmean" and caps is None:
        caps = Caps(1, 2)
    directions = sample_directions(seed, n)
    tallies, freq, mean, rejected = _estimate_with_directions(
        curve, directions, tol, phi, caps
    )
    return MeasureEstimate(n, seed, freq, mean, rejected)


def dominant_knotoid(estimate: MeasureEstimate) -> str:
    """Most frequent class; ties break toward the lexicographically least key."""
    if not estimate.class_freq:
        raise EmptyEstimate("estimate has no accepted samples")
    best = min(estimate.class_freq.items(), key=lambda kv: (-kv[1], kv[0]))
    return best[0]


# ---------------------------------------------------------------------------
# knots to knotoids

def knot_to_knotoid(knot_code: OrientedGaussCode, arc: int) -> OrientedGaussCode:
    """Open a closed-curve code at the gap after pass ``arc`` (cyclic rotate).

    For the empty closed code every arc gives the trivial knotoid.
    """
    if arc < 0:
        raise ArcOutOfRange("arc index must be non-negative")
    passes = list(knot_code.passes)
    if not passes:
        return OrientedGaussCode([], {})
    if arc >= len(passes):
        raise ArcOutOfRange(f"arc {arc} out of range for {len(passes)} gaps")
    rotated = passes[arc + 1 :] + passes[: arc + 1]
    return OrientedGaussCode(rotated, dict(knot_code.signs)).relabeled()


# ---------------------------------------------------------------------------
# noise for stability experiments

def perturbed(curve: OpenCurve3D, radius: float, seed: int) -> OpenCurve3D:
    """Displace every point by an independent uniform draw from a ball."""
    out = []
    for idx, (x, y, z) in enumerate(curve.points):
        zc = 2.0 * _unit_float(rand64(seed, 3 * idx)) - 1.0
        theta = 2.0 * math.pi * _unit_float(rand64(seed, 3 * idx + 1))
        rad = radius * _unit_float(rand64(seed, 3 * idx + 2)) ** (1.0 / 3.0)
        r = math.sqrt(max(0.0, 1.0 - zc * zc))
        out.append(
            (
                x + rad * r * math.cos(theta),
                y + rad * r * math.sin(theta),
                z + rad * zc,
            )
        )
    return OpenCurve3D(tuple(out))
