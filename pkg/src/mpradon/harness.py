"""Discretized translation-invariant Radon operators on a 1-D grid.

The operators under study have the form

    T f(x) = sum_k  int f(x - p(s, t)) bump^{(delta_k)}(s, t) ds dt.

Every term is evaluated in normalized coordinates: substituting
u = delta_k (s, t) turns the term into  int f(x - p(delta_k^{-1} u)) bump(u) du
with one fixed quadrature rule shared by all terms, so a change of variables
that leaves p(delta_k^{-1} u) literally unchanged (the x - st case with
delta_k = (2^k, 2^-k)) produces bit-identical terms.  Terms with identical
displacement profiles are grouped and applied once, which realizes the
(M+1)-fold exactness of that case in floating point.

Grid functions are nodal values with linear interpolation and zero
extension; since p does not depend on x, interpolation at x - d is a
fractional index shift, so one application of T is a short list of
weighted integer shifts (a banded convolution) with a fixed summation
order.  The operator norm is estimated by plain power iteration on T*T
from the all-ones start vector.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bumps import TensorBump, moment_bump
from .symbolic.poly import Polynomial


@dataclass(frozen=True)
class Grid1D:
    xmin: float = -4.0
    xmax: float = 4.0
    n: int = 2048

    def __post_init__(self):
        if self.n < 2 or self.xmax <= self.xmin:
            raise ValueError("grid needs n >= 2 and xmax > xmin")

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n)


@dataclass(frozen=True)
class _TapGroup:
    """One distinct displacement profile: taps w on integer shifts [lo, lo+B)."""

    count: int
    lo: int
    taps: np.ndarray


class DiscretizedOperator:
    """A grouped banded realization of the dyadic-term sum.

    Application is linear convolution with each group's tap filter (computed
    via real FFT with enough zero padding to reproduce zero extension
    exactly), then an integer re-offset; all reductions have a fixed order,
    so results are reproducible bit-for-bit.
    """

    def __init__(self, grid: Grid1D, groups: Sequence[_TapGroup], meta: dict | None = None):
        self.grid = grid
        self.groups = tuple(groups)
        self.meta = dict(meta or {})
        if self.groups:
            lo = min(g.lo for g in self.groups)
            hi = max(g.lo + g.taps.size for g in self.groups)
            combined = np.zeros(hi - lo)
            for g in self.groups:
                combined[g.lo - lo : g.lo - lo + g.taps.size] += float(g.count) * g.taps
        else:
            lo, combined = 0, np.zeros(1)
        self._lo = lo
        self._taps = combined
        nfft = 1
        while nfft < grid.n + combined.size - 1:
            nfft *= 2
        self._nfft = nfft
        self._spectrum = np.fft.rfft(combined, nfft)
        self._spectrum_rev = np.fft.rfft(combined[::-1], nfft)
        if len(self.groups) == 1:
            # exact path: apply the single profile, then scale by its multiplicity,
            # so a sum of identical terms is literally count * (one term's output)
            g = self.groups[0]
            self._single = (g.count, g.lo, np.fft.rfft(g.taps, nfft), np.fft.rfft(g.taps[::-1], nfft), g.taps.size)
        else:
            self._single = None

    @classmethod
    def from_terms(
        cls,
        grid: Grid1D,
        displacement_profiles: Sequence[np.ndarray],
        quad_values: np.ndarray,
        meta: dict | None = None,
    ) -> "DiscretizedOperator":
        """Build from per-term displacement arrays and shared quadrature values.

        quad_values holds (quadrature weight * atom value) per node; each
        term's profile holds p(delta_k^{-1} u) at the same nodes.  Terms with
        bit-identical profiles collapse into one group with a multiplicity,
        which keeps sum-of-equal-terms operators exactly proportional to
        their single-term version.
        """
        h = grid.h
        n = grid.n
        grouped: dict[bytes, list] = {}
        order: list[bytes] = []
        for profile in displacement_profiles:
            profile = np.asarray(profile, dtype=float)
            key = profile.tobytes()
            if key not in grouped:
                grouped[key] = [0, profile]
                order.append(key)
            grouped[key][0] += 1
        groups = []
        for key in order:
            count, profile = grouped[key]
            c = profile / h
            base = np.floor(c).astype(np.int64)
            lam = c - base
            # shifts beyond +-n never touch the grid (zero extension), so the
            # corresponding quadrature nodes are dropped exactly
            keep = (base >= -n) & (base <= n - 1)
            base, lam, values = base[keep], lam[keep], quad_values[keep]
            if base.size == 0:
                groups.append(_TapGroup(count, 0, np.zeros(1)))
                continue
            lo = int(base.min())
            taps = np.zeros(int(base.max()) - lo + 2)
            np.add.at(taps, base - lo, values * (1.0 - lam))
            np.add.at(taps, base - lo + 1, values * lam)
            groups.append(_TapGroup(count, lo, taps))
        return cls(grid, groups, meta)

    def _convolve(self, spectrum: np.ndarray, f_hat: np.ndarray, band: int, lo: int, n: int) -> np.ndarray:
        full = np.fft.irfft(f_hat * spectrum, self._nfft)[: n + band - 1]
        out = np.zeros(n)
        start = max(0, lo)
        stop = min(n, lo + n + band - 1)
        if start < stop:
            out[start:stop] = full[start - lo : stop - lo]
        return out

    def apply(self, f: np.ndarray) -> np.ndarray:
        """T f at the grid nodes: out[i] = sum_g count_g sum_m w_m f[i - m]."""
        f = np.asarray(f, dtype=float)
        n = f.shape[0]
        f_hat = np.fft.rfft(f, self._nfft)
        if self._single is not None:
            count, lo, spec, _, band = self._single
            acc = self._convolve(spec, f_hat, band, lo, n)
            return float(count) * acc if count != 1 else acc
        return self._convolve(self._spectrum, f_hat, self._taps.size, self._lo, n)

    def apply_adjoint(self, f: np.ndarray) -> np.ndarray:
        """The transpose: reversed taps on the mirrored shift range."""
        f = np.asarray(f, dtype=float)
        n = f.shape[0]
        f_hat = np.fft.rfft(f, self._nfft)
        if self._single is not None:
            count, lo, _, spec_rev, band = self._single
            acc = self._convolve(spec_rev, f_hat, band, -(lo + band - 1), n)
            return float(count) * acc if count != 1 else acc
        return self._convolve(
            self._spectrum_rev, f_hat, self._taps.size, -(self._lo + self._taps.size - 1), n
        )

    def as_matrix(self) -> np.ndarray:
        """Dense matrix (column by column); for small-grid oracle checks only."""
        n = self.grid.n
        cols = []
        basis = np.zeros(n)
        for j in range(n):
            basis[:] = 0.0
            basis[j] = 1.0
            cols.append(self.apply(basis))
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class NormResult:
    value: float
    iterations: int
    converged: bool


def operator_norm(
    op: DiscretizedOperator,
    max_iters: int = 400,
    tol: float = 1e-11,
) -> NormResult:
    """Largest singular value via power iteration on T*T, all-ones seed."""
    n = op.grid.n
    v = np.ones(n) / np.sqrt(n)
    sigma_prev = -1.0
    sigma = 0.0
    for it in range(1, max_iters + 1):
        u = op.apply(v)
        sigma = float(np.linalg.norm(u))
        if sigma == 0.0:
            return NormResult(0.0, it, True)
        w = op.apply_adjoint(u)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return NormResult(sigma, it, True)
        v = w / nw
        if abs(sigma - sigma_prev) <= tol * max(sigma, 1e-300):
            return NormResult(sigma, it, True)
        sigma_prev = sigma
    return NormResult(sigma, max_iters, False)


# -- experiment construction ---------------------------------------------


def default_experiment_atom() -> TensorBump:
    """phi (x) phi with int phi = 0 and int s phi ds = 1, supported in (0, 1/2)."""
    phi = moment_bump(0.5, 1).bump
    return TensorBump((phi, phi))


CASES = ("kitty", "know", "billy")


def case_polynomial(case: str, level: int | None = None) -> Polynomial:
    """The flow polynomial p with gamma_t(x) = x - p(s, t) for each case."""
    variables = ("s", "t")
    if case == "kitty":
        return Polynomial.parse("s*t", variables)
    if case == "know":
        if level is None:
            raise ValueError("the 'know' case needs the scale parameter L")
        eps = Fraction(1, 2**level)
        return Polynomial(
            variables, {(3, 0): eps, (0, 3): eps, (1, 1): Fraction(1)}
        )
    if case == "billy":
        return Polynomial.parse("s + s*t", variables)
    raise ValueError(f"unknown case {case!r}; expected one of {CASES}")


def build_operator(
    p: Polynomial,
    scales: Sequence[tuple[float, float]],
    grid: Grid1D,
    atom: TensorBump | None = None,
    quad_order: int = 24,
    quad_panels: int = 2,
    meta: dict | None = None,
) -> DiscretizedOperator:
    """T f(x) = sum_k int f(x - p(delta_k^{-1} u)) atom(u) du on the grid."""
    atom = atom or default_experiment_atom()
    if atom.dimension != 2 or p.nvars != 2:
        raise ValueError("experiment operators are built over two t-variables")
    points, weights = atom.quadrature_rule(quad_order, quad_panels)
    quad_values = weights * atom(points)
    terms = [float(c) for c, _ in p.float_terms()]
    exps = [e for _, e in p.float_terms()]
    profiles = []
    for d1, d2 in scales:
        u1 = points[:, 0] / d1
        u2 = points[:, 1] / d2
        profile = np.zeros(points.shape[0])
        for coef, (e1, e2) in zip(terms, exps):
            profile += coef * u1**e1 * u2**e2
        profiles.append(profile)
    return DiscretizedOperator.from_terms(grid, profiles, quad_values, meta)


def dyadic_scales(m: int) -> list[tuple[float, float]]:
    """delta_k = (2^k, 2^-k) for k = 0..m (the direction n = (1, -1)).

    This is the display family of the unbounded examples; it is not inside
    the kernel class (the second component shrinks), which is exactly why
    its operator sums can grow.
    """
    return [(2.0**k, 2.0**-k) for k in range(m + 1)]


def square_scales(m: int) -> list[tuple[float, float]]:
    """delta_j = (2^j1, 2^j2) over the full square 0 <= j1, j2 <= m.

    This family stays inside the kernel class (indices in N^2), which is the
    setting of the boundedness claim for the x - s - st flow.
    """
    return [(2.0**j1, 2.0**j2) for j1 in range(m + 1) for j2 in range(m + 1)]


@dataclass(frozen=True)
class GrowthRow:
    truncation: int
    level: int | None
    norm: float
    ratio: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class GrowthTable:
    case: str
    grid: Grid1D
    quad_order: int
    rows: tuple[GrowthRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                f"# case={self.case} grid_n={self.grid.n} window=[{self.grid.xmin},{self.grid.xmax}]"
                f" quad_order={self.quad_order} seed=ones"
            ]
        )
        writer.writerow(["M", "L", "norm", "ratio"])
        for r in self.rows:
            writer.writerow([r.truncation, "" if r.level is None else r.level, repr(r.norm), repr(r.ratio)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "grid": {"xmin": self.grid.xmin, "xmax": self.grid.xmax, "n": self.grid.n},
            "quad_order": self.quad_order,
            "seed": "ones",
            "rows": [
                {
                    "M": r.truncation,
                    "L": r.level,
                    "norm": r.norm,
                    "ratio": r.ratio,
                    "iterations": r.iterations,
                    "converged": r.converged,
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows]


def growth_experiment(
    case: str,
    m_list: Sequence[int],
    level: int | None = None,
    grid: Grid1D | None = None,
    atom: TensorBump | None = None,
    quad_order: int = 24,
    quad_panels: int = 2,
    max_iters: int = 400,
    tol: float = 1e-11,
) -> GrowthTable:
    """Operator norms and growth ratios for the three model cases."""
    grid = grid or Grid1D()
    p = case_polynomial(case, level)
    scale_family = square_scales if case == "billy" else dyadic_scales
    rows: list[GrowthRow] = []
    base_norm: float | None = None
    for m in m_list:
        op = build_operator(
            p, scale_family(m), grid, atom=atom, quad_order=quad_order, quad_panels=quad_panels
        )
        res = operator_norm(op, max_iters=max_iters, tol=tol)
        if base_norm is None:
            base_op = build_operator(
                p, scale_family(0), grid, atom=atom, quad_order=quad_order, quad_panels=quad_panels
            )
            base_norm = operator_norm(base_op, max_iters=max_iters, tol=tol).value
        ratio = res.value / base_norm if base_norm else float("inf")
        rows.append(GrowthRow(m, level if case == "know" else None, res.value, ratio, res.iterations, res.converged))
    return GrowthTable(case, grid, quad_order, tuple(rows))
