"""Bit-exact stochastic-number primitives.

Stochastic numbers (SNs) are fixed-length unary bitstreams; a comparator SNG
turns a permutation of {0..N-1} (the number sequence) plus a target count
into an SN.  This module provides the bitstream/number-sequence value types,
comparator-based generation, value decoding, the SCC correlation measure and
the deterministic baseline sequence generators (ramp, reverse ramp, Van der
Corput, Halton, LFSR).

All operations are pure functions over immutable values.
"""

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError


class Encoding(enum.Enum):
    """Value encoding of a stochastic number."""

    UNIPOLAR = "unipolar"
    BIPOLAR = "bipolar"

    def decode_count(self, ones: int, n: int) -> Fraction:
        """Value represented by a stream of length ``n`` with ``ones`` 1-bits."""
        if self is Encoding.UNIPOLAR:
            return Fraction(ones, n)
        return Fraction(2 * ones, n) - 1

    def encode_value(self, value: Fraction, n: int) -> Fraction:
        """Expected 1-bit count for ``value``; inverse of :meth:`decode_count`."""
        value = Fraction(value)
        if self is Encoding.UNIPOLAR:
            return n * value
        return n * (value + 1) / 2

    @property
    def value_range(self) -> tuple[int, int]:
        return (0, 1) if self is Encoding.UNIPOLAR else (-1, 1)

    @property
    def count_scale(self) -> Fraction:
        """Value-domain size of one output count step for stream length 1.

        Multiply by ``|count error| / 1`` and divide by N to move a count
        error into the value domain.
        """
        return Fraction(1) if self is Encoding.UNIPOLAR else Fraction(2)


@dataclass(frozen=True)
class Bitstream:
    """A length-``n`` unary bitstream; bit ``j`` of ``mask`` is cycle ``j``."""

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"bitstream length must be >= 1, got {self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} out of range for n={self.n}")

    @classmethod
    def from_bits(cls, bits) -> "Bitstream":
        bits = list(bits)
        mask = 0
        for j, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bit {j} is {b!r}, expected 0 or 1")
            mask |= b << j
        return cls(len(bits), mask)

    @classmethod
    def from_string(cls, text: str) -> "Bitstream":
        """Parse an ASCII '0'/'1' string; index 0 is the first cycle."""
        return cls.from_bits(int(c) for c in text)

    def bit(self, j: int) -> int:
        return (self.mask >> j) & 1

    def bits(self) -> list[int]:
        return [(self.mask >> j) & 1 for j in range(self.n)]

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits())

    @property
    def popcount(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class NumberSequence:
    """A permutation of {0..N-1} driving a comparator SNG."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if sorted(self.values) != list(range(len(self.values))):
            raise ValueError(
                f"sequence {self.values} is not a permutation of 0..{len(self.values) - 1}"
            )

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, j: int) -> int:
        return self.values[j]


def generate(seq: NumberSequence, target: int) -> Bitstream:
    """Comparator SNG: bit ``j`` is 1 iff ``seq[j] < target``.

    ``target`` counts the 1-bits of the result and must lie in ``[0, N]``.
    """
    n = seq.n
    if not 0 <= target <= n:
        raise ValueError(f"target {target} out of range [0, {n}]")
    mask = 0
    for j, v in enumerate(seq.values):
        if v < target:
            mask |= 1 << j
    return Bitstream(n, mask)


def decode(bs: Bitstream, enc: Encoding) -> Fraction:
    """Exact value of a bitstream under the given encoding."""
    return enc.decode_count(bs.popcount, bs.n)


def scc(x: Bitstream, y: Bitstream) -> Fraction | None:
    """Stochastic computing correlation of two equal-length streams.

    +1 is maximum positive, -1 maximum negative, 0 uncorrelated.  Returns
    ``None`` (undefined) when either stream is constant, since the measure
    normalises by how far the overlap can move, which is zero there.
    """
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")
    n = x.n
    cx, cy = x.popcount, y.popcount
    if cx in (0, n) or cy in (0, n):
        return None
    px, py = Fraction(cx, n), Fraction(cy, n)
    p_and = Fraction((x.mask & y.mask).bit_count(), n)
    delta = p_and - px * py
    if delta > 0:
        return delta / (min(px, py) - px * py)
    if delta < 0:
        return delta / (px * py - max(px + py - 1, Fraction(0)))
    return Fraction(0)


def average_scc(sx: NumberSequence, sy: NumberSequence) -> Fraction:
    """Mean SCC over all generated SN pairs with a defined correlation.

    Sweeps targets (a, b) in [0, N]^2; pairs where either stream is constant
    (targets 0 and N, where SCC is undefined) are skipped and the mean is
    taken over the remaining pairs.
    """
    if sx.n != sy.n:
        raise ValueError(f"length mismatch: {sx.n} != {sy.n}")
    n = sx.n
    xs = [generate(sx, a) for a in range(n + 1)]
    ys = [generate(sy, b) for b in range(n + 1)]
    total = Fraction(0)
    count = 0
    for x in xs:
        for y in ys:
            v = scc(x, y)
            if v is not None:
                total += v
                count += 1
    if count == 0:
        raise ConfigError(f"no defined SCC pairs at n={n}")
    return total / count


# Maximal-length Fibonacci tap sets for widths 2..8 under the shift
# convention of _lfsr_states (feedback = parity of tapped bits, injected at
# the MSB).  Verified by the period property test: all 2^w - 1 nonzero
# states occur before the walk repeats.
_LFSR_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 1),
    5: (3, 1),
    6: (6, 1),
    7: (7, 1),
    8: (6, 4, 3, 1),
}


@dataclass(frozen=True)
class GeneratorKind:
    """Identifies a deterministic baseline number-sequence generator.

    ``name`` is one of ramp, reverse_ramp, vdc, halton, lfsr.  Halton takes a
    ``base`` (vdc is halton base 2); LFSR width is derived from the sequence
    length and ``taps`` may override the built-in maximal-length table.
    """

    name: str
    base: int = 3
    taps: tuple[int, ...] | None = None

    _NAMES = ("ramp", "reverse_ramp", "vdc", "halton", "lfsr")

    def __post_init__(self):
        if self.name not in self._NAMES:
            raise ConfigError(f"unknown generator kind {self.name!r}")
        if self.name == "halton" and self.base < 2:
            raise ConfigError(f"halton base must be >= 2, got {self.base}")

    @classmethod
    def parse(cls, text: str) -> "GeneratorKind":
        """Parse labels like "ramp", "vdc", "halton3", "lfsr"."""
        text = text.strip().lower()
        if text.startswith("halton") and text[6:].isdigit():
            return cls("halton", base=int(text[6:]))
        return cls(text)

    def label(self) -> str:
        return f"halton{self.base}" if self.name == "halton" else self.name


def _bit_reverse(i: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def _digit_reverse(i: int, base: int, ndigits: int) -> int:
    out = 0
    for _ in range(ndigits):
        out = out * base + i % base
        i //= base
    return out


def _lfsr_states(width: int, taps: tuple[int, ...]) -> list[int]:
    """All-ones-seeded Fibonacci LFSR state walk of length 2^width - 1."""
    tap_mask = 0
    for t in taps:
        if not 1 <= t <= width:
            raise ConfigError(f"tap {t} out of range for width {width}")
        tap_mask |= 1 << (t - 1)
    state = (1 << width) - 1
    out = []
    for _ in range((1 << width) - 1):
        out.append(state)
        feedback = (state & tap_mask).bit_count() & 1
        state = (state >> 1) | (feedback << (width - 1))
    return out


def baseline_sequence(kind: GeneratorKind | str, n: int) -> NumberSequence:
    """Deterministic permutation of [0, n) for the requested generator.

    Raises :class:`ConfigError` when ``n`` is incompatible with the kind
    (halton needs n = base^k, lfsr needs n = 2^w with w in 2..8).
    """
    if isinstance(kind, str):
        kind = GeneratorKind.parse(kind)
    if n < 1:
        raise ConfigError(f"sequence length must be >= 1, got {n}")

    if kind.name == "ramp":
        return NumberSequence(tuple(range(n)))
    if kind.name == "reverse_ramp":
        return NumberSequence(tuple(range(n - 1, -1, -1)))
    if kind.name == "vdc":
        width = n.bit_length() - 1
        if 1 << width != n:
            raise ConfigError(f"vdc requires n to be a power of two, got {n}")
        return NumberSequence(tuple(_bit_reverse(i, width) for i in range(n)))
    if kind.name == "halton":
        ndigits = 0
        size = 1
        while size < n:
            size *= kind.base
            ndigits += 1
        if size != n:
            raise ConfigError(f"halton base {kind.base} requires n = {kind.base}^k, got {n}")
        return NumberSequence(tuple(_digit_reverse(i, kind.base, ndigits) for i in range(n)))
    # lfsr: 2^w - 1 register states (never zero), value 0 appended to
    # complete the permutation.
    width = n.bit_length() - 1
    if 1 << width != n:
        raise ConfigError(f"lfsr requires n to be a power of two, got {n}")
    taps = kind.taps if kind.taps is not None else _LFSR_TAPS.get(width)
    if taps is None:
        raise ConfigError(f"no built-in lfsr taps for width {width} (supported: 2..8)")
    states = _lfsr_states(width, taps)
    if len(set(states)) != n - 1:
        raise ConfigError(f"taps {taps} are not maximal-length for width {width}")
    return NumberSequence(tuple(states) + (0,))
