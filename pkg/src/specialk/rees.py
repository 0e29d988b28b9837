"""Rees construction for filtered vector spaces and the bundles they
induce on the line and on P^1: section counts, splitting type, degree,
slope, semistability and the brute-force purity oracle.

Sections are never materialized as polynomial matrices; everything is
computed from degreewise intersection dimensions, which is exact and
validated against the pure case where the answer is a line-bundle power.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import ExactComplex, Subspace
from .hodge import Filtration

__all__ = [
    "InconsistentProfileError",
    "ReesBundle",
    "SplittingType",
    "rees_generators",
    "filtration_from_module",
    "h0",
    "splitting_type",
    "bundle_degree",
    "is_semistable_of_slope",
    "purity_oracle",
]


class InconsistentProfileError(RuntimeError):
    """No degree multiset reproduces the section-count profile (this
    signals an arithmetic bug; genuine filtration pairs always fit)."""


@dataclass(frozen=True)
class ReesBundle:
    """Bundle on P^1 glued from the Rees modules of two complete
    filtrations on the same space; twist shifts at infinity."""

    f: Filtration
    fbar: Filtration
    twist: int = 0

    def __post_init__(self):
        if self.f.ambient_dim != self.fbar.ambient_dim:
            raise ValueError("filtrations live on different spaces")

    @property
    def rank(self) -> int:
        return self.f.ambient_dim


@dataclass(frozen=True)
class SplittingType:
    """Weakly decreasing Birkhoff-Grothendieck degrees."""

    degrees: tuple

    def __post_init__(self):
        if any(a < b for a, b in zip(self.degrees, self.degrees[1:])):
            raise ValueError("degrees must be weakly decreasing")

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def degree(self) -> int:
        return sum(self.degrees)

    @property
    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    def is_constant(self, w: int) -> bool:
        return all(a == w for a in self.degrees)


def rees_generators(f: Filtration):
    """Minimal generating set of the Rees module: a basis adapted to the
    filtration, each vector tagged with the largest k with v in F^k.

    Extending a basis of F^{k+1} to F^k level by level makes the level-k
    count equal dim Gr^k, which is the fiber-at-zero dimension count."""
    gens = []
    current = Subspace.zero(f.ambient_dim)
    for k in range(f.length - 1, -1, -1):
        target = f.step(k)
        for vec in target.basis:
            if not current.contains(vec):
                gens.append((k, vec))
                current = current + Subspace.span(f.ambient_dim, [vec])
    if not current.is_full():
        raise ValueError("filtration is not complete")
    return gens


def filtration_from_module(ambient_dim: int, generators) -> Filtration:
    """Inverse of rees_generators: F^k = span{v_j : k_j >= k}.

    Redundant generators are harmless; the generators must span the
    space once the grading is forgotten."""
    gens = [(int(k), tuple(ExactComplex.coerce(x) for x in v)) for k, v in generators]
    if any(k < 0 for k, _ in gens):
        raise ValueError("generator exponents must be nonnegative")
    full = Subspace.span(ambient_dim, [v for _, v in gens])
    if not full.is_full():
        raise ValueError("generators do not span the space")
    top = max(k for k, _ in gens)
    proper = []
    for k in range(1, top + 1):
        proper.append(
            Subspace.span(ambient_dim, [v for kk, v in gens if kk >= k])
        )
    return Filtration.from_proper_steps(ambient_dim, proper)


def h0(bundle: ReesBundle, m: int = 0) -> int:
    """Global sections of the twist by m at infinity:
    h^0 = sum_d dim(F^{-d} /\\ Fbar^{d-m})."""
    mm = m + bundle.twist
    f, fbar = bundle.f, bundle.fbar
    lo = 1 - f.length
    hi = mm + fbar.length - 1
    total = 0
    for d in range(lo, hi + 1):
        a = f.step(-d)
        b = fbar.step(d - mm)
        if a.is_zero() or b.is_zero():
            continue
        if a.is_full():
            total += b.dim
        elif b.is_full():
            total += a.dim
        else:
            total += (a & b).dim
    return total


def bundle_degree(bundle: ReesBundle) -> int:
    """deg = sum_p p dim Gr_F^p + sum_q q dim Gr_Fbar^q (+ rank * twist)."""
    d = 0
    for p, g in enumerate(bundle.f.graded_dims()):
        d += p * g
    for q, g in enumerate(bundle.fbar.graded_dims()):
        d += q * g
    return d + bundle.rank * bundle.twist


def splitting_type(bundle: ReesBundle) -> SplittingType:
    """Recover the unique multiset {a_i} with
    h0(m) = sum_i max(a_i + m + 1, 0) from the section-count profile.

    The profile increment at m counts the degrees >= -m, so consecutive
    increments isolate the multiplicity of each degree; the scan starts
    where h0 vanishes and stops once the increment saturates at the rank
    twice in a row."""
    rank = bundle.rank
    start = -(bundle.f.length + bundle.fbar.length) - 1 - abs(bundle.twist)
    prev = h0(bundle, start)
    if prev != 0:
        raise InconsistentProfileError("sections persist below the degree window")
    counts = {}
    m = start
    prev_inc = 0
    saturated = 0
    while saturated < 2:
        m += 1
        cur = h0(bundle, m)
        inc = cur - prev
        if inc < prev_inc or inc > rank:
            raise InconsistentProfileError("section profile is not convex")
        mult = inc - prev_inc
        if mult:
            counts[-m] = mult
        if inc == rank:
            saturated += 1
        prev, prev_inc = cur, inc
        if m > start + 4 * (bundle.f.length + bundle.fbar.length + abs(bundle.twist) + 4):
            raise InconsistentProfileError("section profile failed to saturate")
    degrees = []
    for a, mult in sorted(counts.items(), reverse=True):
        degrees.extend([a] * mult)
    if len(degrees) != rank:
        raise InconsistentProfileError("degree multiset does not match the rank")
    st = SplittingType(tuple(degrees))
    if st.degree != bundle_degree(bundle):
        raise InconsistentProfileError("degree cross-check failed")
    return st


def is_semistable_of_slope(bundle: ReesBundle, w: int) -> bool:
    """On P^1 semistable of slope w means splitting type (w, ..., w)."""
    return splitting_type(bundle).is_constant(w)


def purity_oracle(f: Filtration, fbar: Filtration, w: int) -> bool:
    """Brute force: the intersections F^p /\\ Fbar^{w-p} fill the space
    and are independent."""
    if f.ambient_dim != fbar.ambient_dim:
        raise ValueError("filtrations live on different spaces")
    n = f.ambient_dim
    pieces = []
    for p in range(w - fbar.length + 1, f.length):
        piece = f.step(p) & fbar.step(w - p)
        if piece.dim:
            pieces.append(piece)
    total_dim = sum(p.dim for p in pieces)
    if total_dim != n:
        return False
    acc = Subspace.zero(n)
    for p in pieces:
        acc = acc + p
    return acc.dim == n
