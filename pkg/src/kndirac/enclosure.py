"""Certified eigenvalue enclosures from conjugate pairs of the second order spectrum.

Two rules are available.  The basic rule turns a pair z, conj(z) into the
interval [Re z - |Im z|, Re z + |Im z|], which always meets the spectrum.
The sharpened rule needs a segment (a, b) known to contain exactly one
eigenvalue and z inside the open disk with diameter (a, b); it then gives

    Re z - |Im z|^2 / (b - Re z)  <  lambda  <  Re z + |Im z|^2 / (Re z - a).
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateSegment, DiskViolation, ParseError
from .quadratic_spectrum import ConjugatePair, SecondOrderSpectrum, extract_pairs, nearest_pair

LABELS = ("analytic", "numeric", "user")


@dataclass(frozen=True)
class AprioriSegment:
    """Real interval (a, b) asserted by the caller to hold exactly one eigenvalue.

    The one-eigenvalue property cannot be checked here; ``label`` records
    where the assertion came from so that every output stays auditable.
    """

    a: float
    b: float
    label: str = "user"

    def __post_init__(self):
        if not self.a < self.b:
            raise DegenerateSegment(f"segment needs a < b, got ({self.a}, {self.b})")

    def contains(self, x: float) -> bool:
        return self.a < x < self.b


@dataclass(frozen=True)
class Enclosure:
    lower: float
    upper: float
    kind: str
    source: ConjugatePair
    segment: AprioriSegment | None = None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def basic_enclosure(pair: ConjugatePair) -> Enclosure:
    return Enclosure(pair.center - pair.height, pair.center + pair.height, "basic", pair)


def disk_contains(a: float, b: float, z: complex) -> bool:
    """True iff z lies in the open disk whose diameter is the segment (a, b)."""
    if not a < b:
        raise DegenerateSegment(f"segment needs a < b, got ({a}, {b})")
    return abs(z - (a + b) / 2) < (b - a) / 2


def _round_down(q: Fraction) -> float:
    x = float(q)
    return math.nextafter(x, -math.inf) if Fraction(x) > q else x


def _round_up(q: Fraction) -> float:
    x = float(q)
    return math.nextafter(x, math.inf) if Fraction(x) < q else x


def sharpened_endpoints(center: float, height: float, a: float, b: float):
    """Exact rational endpoints of the sharpened interval."""
    c, h2 = Fraction(center), Fraction(height) ** 2
    return c - h2 / (Fraction(b) - c), c + h2 / (c - Fraction(a))


def sharpened_enclosure(pair: ConjugatePair, seg: AprioriSegment) -> Enclosure:
    """Sharpened enclosure; refuses (DiskViolation) when z is outside the disk.

    Endpoints are evaluated in exact rational arithmetic from the floating
    point inputs and then rounded outward to the nearest double.
    """
    if not disk_contains(seg.a, seg.b, pair.z_plus):
        raise DiskViolation(
            f"{pair.z_plus} is not inside the disk over ({seg.a}, {seg.b}); "
            "the sharpened bound is not certified"
        )
    lo, hi = sharpened_endpoints(pair.center, pair.height, seg.a, seg.b)
    return Enclosure(_round_down(lo), _round_up(hi), "sharpened", pair, seg)


def best_enclosure(spec: SecondOrderSpectrum, target: float, segments=()) -> Enclosure:
    """Narrowest certified enclosure from the pair nearest ``target``.

    Every segment that contains ``target`` and whose disk contains the pair
    is tried; a sharpened interval replaces the basic one only when it is
    strictly narrower.
    """
    pair = nearest_pair(extract_pairs(spec), target)
    best = basic_enclosure(pair)
    for seg in segments:
        if not seg.contains(target) or not disk_contains(seg.a, seg.b, pair.z_plus):
            continue
        cand = sharpened_enclosure(pair, seg)
        if cand.width < best.width:
            best = cand
    return best


def isolating_segments(segments):
    """Widen enclosures of consecutive eigenvalues to maximal isolating segments.

    ``segments`` must enclose consecutive eigenvalues in increasing order
    with pairwise disjoint intervals.  The k-th result runs from the upper
    bound of the (k-1)-th to the lower bound of the (k+1)-th; the two
    outermost segments are returned unchanged on their open side.
    """
    segs = sorted(segments, key=lambda s: s.a)
    for s, t in zip(segs, segs[1:]):
        if not s.b <= t.a:
            raise DegenerateSegment(f"segments ({s.a}, {s.b}) and ({t.a}, {t.b}) overlap")
    out = []
    for k, s in enumerate(segs):
        a = segs[k - 1].b if k > 0 else s.a
        b = segs[k + 1].a if k + 1 < len(segs) else s.b
        out.append(AprioriSegment(a, b, s.label))
    return out


def parse_apriori(text: str):
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 'a b label', got {raw!r}", lineno)
        try:
            a, b = float(fields[0].replace("−", "-")), float(fields[1].replace("−", "-"))
        except ValueError as exc:
            raise ParseError(f"bad number in {raw!r}", lineno) from exc
        label = fields[2] if len(fields) == 3 else "user"
        if label not in LABELS:
            raise ParseError(f"label must be one of {LABELS}, got {label!r}", lineno)
        try:
            segments.append(AprioriSegment(a, b, label))
        except DegenerateSegment as exc:
            raise DegenerateSegment(f"line {lineno}: {exc}") from None
    return segments


def load_apriori(source):
    """Read a-priori segments from a path or a text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return parse_apriori(fh.read())
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return parse_apriori(source.read())
    raise TypeError(f"cannot read segments from {type(source).__name__}")


def write_apriori(segments, stream, header: str | None = None) -> None:
    if header:
        for line in header.splitlines():
            stream.write(f"# {line}\n")
    for s in segments:
        stream.write(f"{s.a!r} {s.b!r} {s.label}\n")
