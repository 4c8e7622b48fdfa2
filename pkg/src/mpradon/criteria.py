"""Exact boundedness criteria.

Three decision procedures, all in rational arithmetic:

  * ``real_line_verdict`` -- the Newton-line test for gamma_(s,t)(x) = x - p(s,t)
    with product kernels: bounded iff every exponent (e, f) of p lies on or
    above the line through (a, 0) and (0, b), where a and b are the minimal
    pure powers of s and t (infinite when absent, with the convention
    x / inf = 0).

  * ``heisenberg_verdict`` -- the supporting-line test on H^1: for every
    nonpure alpha_0 with Xhat_{alpha_0} != 0 and every line through
    deg(alpha_0) with normal (b_1, b_2) in [0, inf)^2 \\ {0}, the field
    Xhat_{alpha_0} must lie in the span of the bracket closure elements on
    or below the line.  "All lines" is decided by finite sector enumeration:
    membership in H_pi is piecewise constant in the normal direction, the
    breakpoints are the directions orthogonal to degree differences, and a
    sector-endpoint H_pi contains both neighbours' H_pi, so a rational
    midpoint per open sector is a complete check.

  * ``scalar_control_verdict`` -- the abelian case (all expansion fields
    parallel to one constant field): for nu = 2 this is the same sector
    test with trivial brackets; for general nu it is membership of the
    nonpure degree in the Newton polyhedron conv(pure degrees) + R_+^nu,
    decided by enumerating the kink vertices of b |-> min_d b . (d - d0)
    over the normal simplex.

Verdicts carry machine-checkable data: an Unbounded verdict names the
violating multi-index and a witnessing normal; a Bounded verdict carries,
for every nonpure index checked, the spanning subset used in each sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .dilations import Degree, ExponentScheme, MultiIndex, degree, is_pure
from .symbolic.fields import HEISENBERG_BASIS, BasisVector
from .symbolic.gamma import (
    HEISENBERG,
    GammaSpec,
    UnsupportedFamily,
    WExpansion,
    xhat_expansion,
)
from .symbolic.poly import Polynomial


class Outcome(str, Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Witness:
    """Why the operator family is unbounded: which index, which line."""

    alpha0: MultiIndex | None
    degree: Degree
    normal: tuple[Fraction, ...]
    reason: str


@dataclass(frozen=True)
class SectorCertificate:
    """One sector's check: the normal tested and the spanning combination."""

    normal: tuple[Fraction, ...]
    members: tuple[str, ...]
    coefficients: tuple[Fraction, ...]


@dataclass(frozen=True)
class ControlCertificate:
    alpha0: MultiIndex | None
    degree: Degree
    sectors: tuple[SectorCertificate, ...]


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    witness: Witness | None = None
    certificates: tuple[ControlCertificate, ...] = ()
    diagnostics: str = ""

    def __post_init__(self):
        if self.outcome is Outcome.UNBOUNDED and self.witness is None:
            raise ValueError("unbounded verdicts must carry a witness")

    @property
    def bounded(self) -> bool:
        return self.outcome is Outcome.BOUNDED


@dataclass(frozen=True)
class ClosureEntry:
    vec: BasisVector
    degree: Degree
    label: str


@dataclass(frozen=True)
class PowerSets:
    """Pure/nonpure split of an expansion plus the bracket closure of the pure part."""

    scheme: ExponentScheme
    pure: tuple[ClosureEntry, ...]
    nonpure: tuple[tuple[MultiIndex, ClosureEntry], ...]
    closure: tuple[ClosureEntry, ...]


# -- rational linear algebra ------------------------------------------


def express_in_span(
    vectors: Sequence[tuple[Fraction, ...]], target: tuple[Fraction, ...]
) -> dict[int, Fraction] | None:
    """Coefficients lambda with sum lambda_j vectors[j] = target, or None.

    Gaussian elimination over Q; free variables are set to zero, so the
    support of the solution is a pivot subset (a minimal spanning witness).
    """
    dim = len(target)
    m = len(vectors)
    rows = [[vectors[j][i] for j in range(m)] + [target[i]] for i in range(dim)]
    r = 0
    pivots: list[tuple[int, int]] = []
    for col in range(m):
        pr = next((i for i in range(r, dim) if rows[i][col] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(dim):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append((r, col))
        r += 1
        if r == dim:
            break
    for i in range(r, dim):
        if rows[i][m] != 0:
            return None
    return {col: rows[row][m] for row, col in pivots if rows[row][m] != 0}


def _solve_linear(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square rational system, or None if singular."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pr = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pr is None:
            return None
        a[col], a[pr] = a[pr], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [u - f * v for u, v in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


# -- sector enumeration on the normal ray -----------------------------


def _primitive(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a nonnegative rational vector to coprime integer entries."""
    fracs = [Fraction(x) for x in v]
    mult = 1
    for f in fracs:
        mult = mult * f.denominator // gcd(mult, f.denominator)
    ints = [int(f * mult) for f in fracs]
    g = 0
    for n in ints:
        g = gcd(g, n)
    return tuple(Fraction(n // g) for n in ints) if g else tuple(fracs)


def _critical_normals(diffs: Iterable[Degree]) -> list[tuple[Fraction, Fraction]]:
    """Interior normal directions where some half-plane membership flips."""
    out = set()
    for d in diffs:
        d1, d2 = d
        if (d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0):
            n = (-d2, d1) if d1 > 0 else (d2, -d1)
            out.add(_primitive(n))
    return sorted(out, key=lambda n: Fraction(n[1], n[0]))


def sector_normals(diffs: Iterable[Degree]) -> list[tuple[Fraction, Fraction]]:
    """One rational representative normal per open sector of [axis, axis]."""
    boundary = [(Fraction(1), Fraction(0))] + _critical_normals(diffs) + [
        (Fraction(0), Fraction(1))
    ]
    return [
        _primitive((u[0] + v[0], u[1] + v[1])) for u, v in zip(boundary, boundary[1:])
    ]


# -- Heisenberg criterion ----------------------------------------------


def pure_closure_heisenberg(
    xhat: WExpansion, scheme: ExponentScheme | None = None
) -> PowerSets:
    """Split Xhat into pure/nonpure and close the pure part under brackets.

    Brackets use the structure relation [aX+bY+cT, a'X+b'Y+c'T] = (ab'-a'b)T;
    since every bracket is central the closure stabilizes after one round,
    but the loop below runs to an honest fixed point.
    """
    if xhat.basis != HEISENBERG_BASIS:
        raise ValueError("expansion must carry the Heisenberg basis tag {X, Y, T}")
    scheme = scheme or xhat.scheme
    pure: list[ClosureEntry] = []
    nonpure: list[tuple[MultiIndex, ClosureEntry]] = []
    for alpha in xhat.support():
        d = degree(alpha, scheme)
        entry = ClosureEntry(xhat.terms[alpha], d, f"Xhat_{alpha}")
        if is_pure(d):
            pure.append(entry)
        else:
            nonpure.append((alpha, entry))
    closure = list(pure)
    seen = {(e.vec.coords, e.degree) for e in closure}
    frontier = list(closure)
    while frontier:
        fresh: list[ClosureEntry] = []
        for a in closure:
            for b in frontier:
                for left, right in ((a, b), (b, a)):
                    br = left.vec.bracket(right.vec)
                    if br.is_zero():
                        continue
                    d = tuple(x + y for x, y in zip(left.degree, right.degree))
                    key = (br.coords, d)
                    if key in seen:
                        continue
                    seen.add(key)
                    fresh.append(ClosureEntry(br, d, f"[{left.label}, {right.label}]"))
        closure.extend(fresh)
        frontier = fresh
    return PowerSets(scheme, tuple(pure), tuple(nonpure), tuple(closure))


def supporting_line_condition(
    alpha0: MultiIndex,
    target: BasisVector,
    power_sets: PowerSets,
) -> tuple[bool, ControlCertificate | Witness]:
    """Is the target spanned by H_pi for every supporting line through deg(alpha0)?"""
    d0 = degree(alpha0, power_sets.scheme)
    if is_pure(d0):
        raise ValueError(f"alpha0={alpha0} has pure degree {d0}; only nonpure indices are tested")
    if target.is_zero():
        raise ValueError("target field must be nonzero")
    if len(d0) != 2:
        raise ValueError("the supporting-line test needs a two-parameter scheme")
    diffs = [tuple(x - y for x, y in zip(e.degree, d0)) for e in power_sets.closure]
    sectors: list[SectorCertificate] = []
    for normal in sector_normals(diffs):
        bound = normal[0] * d0[0] + normal[1] * d0[1]
        members = [
            e
            for e in power_sets.closure
            if normal[0] * e.degree[0] + normal[1] * e.degree[1] <= bound
        ]
        combo = express_in_span([e.vec.coords for e in members], target.coords)
        if combo is None:
            return False, Witness(
                alpha0,
                d0,
                normal,
                f"Xhat_{alpha0} is outside span(H_pi) for the line with normal {normal}; "
                f"H_pi = {[e.label for e in members]}",
            )
        sectors.append(
            SectorCertificate(
                normal,
                tuple(members[j].label for j in sorted(combo)),
                tuple(combo[j] for j in sorted(combo)),
            )
        )
    return True, ControlCertificate(alpha0, d0, tuple(sectors))


def heisenberg_verdict(spec: GammaSpec) -> Verdict:
    """Theorem-level decision for left-invariant curves on H^1 (nu = 2 kernels)."""
    if spec.family != HEISENBERG:
        raise UnsupportedFamily("heisenberg_verdict needs a heisenberg GammaSpec")
    nu = spec.scheme.n_params
    if nu == 1:
        return Verdict(
            Outcome.BOUNDED,
            diagnostics="single-parameter kernels: control is automatic for real analytic curves",
        )
    if nu != 2:
        return Verdict(
            Outcome.INCONCLUSIVE,
            diagnostics=f"supporting-line criterion is formulated for nu = 2, got nu = {nu}",
        )
    xhat = xhat_expansion(spec)
    power_sets = pure_closure_heisenberg(xhat)
    certificates = []
    for alpha0, entry in power_sets.nonpure:
        ok, payload = supporting_line_condition(alpha0, entry.vec, power_sets)
        if not ok:
            return Verdict(Outcome.UNBOUNDED, witness=payload)
        certificates.append(payload)
    return Verdict(Outcome.BOUNDED, certificates=tuple(certificates))


# -- real line criterion ------------------------------------------------


def real_line_verdict(p: Polynomial) -> Verdict:
    """Newton-line test for T f(x) = int f(x - p(s,t)) K(s,t) ds dt."""
    if p.nvars != 2:
        raise ValueError("the real-line criterion expects a polynomial in (s, t)")
    if p.constant_term() != 0:
        raise ValueError("p must have zero constant term")
    a = min((e for (e, f) in p.terms if f == 0), default=None)
    b = min((f for (e, f) in p.terms if e == 0), default=None)

    def line_value(e: int, f: int) -> Fraction:
        v = Fraction(0)
        if a is not None:
            v += Fraction(e, a)
        if b is not None:
            v += Fraction(f, b)
        return v

    violators = sorted(
        ((line_value(e, f), (e, f)) for (e, f) in p.terms if line_value(e, f) < 1),
        key=lambda t: (t[0], sum(t[1]), t[1]),
    )
    scheme = ExponentScheme.product(2)
    if not violators:
        a_str = str(a) if a is not None else "inf"
        b_str = str(b) if b is not None else "inf"
        return Verdict(
            Outcome.BOUNDED,
            diagnostics=f"every exponent lies on or above the line through ({a_str}, 0) and (0, {b_str})",
        )
    _, alpha0 = violators[0]
    if a is None and b is None:
        normal = (Fraction(1), Fraction(1))
    else:
        normal = _primitive(
            (
                Fraction(1, a) if a is not None else Fraction(0),
                Fraction(1, b) if b is not None else Fraction(0),
            )
        )
    return Verdict(
        Outcome.UNBOUNDED,
        witness=Witness(
            alpha0,
            degree(alpha0, scheme),
            normal,
            f"exponent {alpha0} lies strictly below the Newton line "
            f"(a={a if a is not None else 'inf'}, b={b if b is not None else 'inf'})",
        ),
    )


# -- scalar (abelian) control -------------------------------------------


def _abelian_violating_normal(
    pure_degrees: list[Degree], d0: Degree, nu: int
) -> tuple[Fraction, ...] | None:
    """A normal b >= 0 with b.d > b.d0 for every pure degree d, if one exists.

    Maximizes the concave piecewise-linear b |-> min_d b.(d - d0) over the
    simplex; the maximum sits on a vertex of the kink arrangement, so it is
    enough to scan solutions of nu-1 tight constraints plus normalization.
    """
    if not pure_degrees:
        return tuple(Fraction(1) for _ in range(nu))
    diffs = [tuple(x - y for x, y in zip(d, d0)) for d in pure_degrees]

    def worst(b: Sequence[Fraction]) -> Fraction:
        return min(sum(bi * di for bi, di in zip(b, diff)) for diff in diffs)

    constraints: list[tuple[Fraction, ...]] = []
    for i, j in combinations(range(len(diffs)), 2):
        row = tuple(diffs[i][mu] - diffs[j][mu] for mu in range(nu))
        if any(v != 0 for v in row):
            constraints.append(row)
    for mu in range(nu):
        constraints.append(tuple(Fraction(1 if k == mu else 0) for k in range(nu)))

    candidates: set[tuple[Fraction, ...]] = set()
    for mu in range(nu):
        candidates.add(tuple(Fraction(1 if k == mu else 0) for k in range(nu)))
    ones = [Fraction(1)] * nu
    for subset in combinations(range(len(constraints)), nu - 1):
        matrix = [list(constraints[k]) for k in subset] + [ones]
        sol = _solve_linear(matrix, [Fraction(0)] * (nu - 1) + [Fraction(1)])
        if sol is not None and all(v >= 0 for v in sol):
            candidates.add(tuple(sol))
    best = max(candidates, key=worst)
    return _primitive(best) if worst(best) > 0 else None


def scalar_control_verdict(
    w: WExpansion, scheme: ExponentScheme | None = None
) -> Verdict:
    """Control decision when every expansion field is parallel to one constant field."""
    scheme = scheme or w.scheme
    support = w.support()
    if not support:
        return Verdict(Outcome.BOUNDED, diagnostics="zero expansion")
    v0 = w.terms[support[0]]
    for alpha in support:
        if w.terms[alpha].parallel_ratio(v0) is None:
            return Verdict(
                Outcome.INCONCLUSIVE,
                diagnostics=f"field at {alpha} is not parallel to the field at {support[0]}; "
                "the scalar reduction does not apply",
            )
    pure_entries: list[ClosureEntry] = []
    nonpure_entries: list[tuple[MultiIndex, ClosureEntry]] = []
    for alpha in support:
        d = degree(alpha, scheme)
        entry = ClosureEntry(w.terms[alpha], d, f"X_{alpha}")
        if is_pure(d):
            pure_entries.append(entry)
        else:
            nonpure_entries.append((alpha, entry))
    nu = scheme.n_params
    if not nonpure_entries:
        return Verdict(Outcome.BOUNDED, diagnostics="all degrees are pure")
    if nu == 2:
        # Parallel constant fields bracket to zero, so the closure is the pure set.
        power_sets = PowerSets(scheme, tuple(pure_entries), tuple(nonpure_entries), tuple(pure_entries))
        certificates = []
        for alpha0, entry in nonpure_entries:
            ok, payload = supporting_line_condition(alpha0, entry.vec, power_sets)
            if not ok:
                return Verdict(Outcome.UNBOUNDED, witness=payload)
            certificates.append(payload)
        return Verdict(Outcome.BOUNDED, certificates=tuple(certificates))
    pure_degrees = [e.degree for e in pure_entries]
    certificates = []
    for alpha0, entry in nonpure_entries:
        bad = _abelian_violating_normal(pure_degrees, entry.degree, nu)
        if bad is not None:
            return Verdict(
                Outcome.UNBOUNDED,
                witness=Witness(
                    alpha0,
                    entry.degree,
                    bad,
                    f"degree {entry.degree} lies outside the Newton polyhedron of the pure degrees",
                ),
            )
        certificates.append(ControlCertificate(alpha0, entry.degree, ()))
    return Verdict(Outcome.BOUNDED, certificates=tuple(certificates))
