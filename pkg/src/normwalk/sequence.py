"""Finite +-1 sequences, patterns, and deterministic random generation.

Symbols are stored as bits, ``0 -> -1`` and ``1 -> +1``.  Sequences are
packed eight symbols per byte (little bit order) and are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidLengthError

__all__ = [
    "BinarySequence",
    "Pattern",
    "SeedSpec",
    "SequenceParseError",
    "InvalidLengthError",
    "random_sequence",
    "random_bits",
    "parse_sequence",
    "render_sequence",
    "read_sequences",
    "negate",
]

_MASK64 = (1 << 64) - 1


class SequenceParseError(ValueError):
    """A character outside the admitted alphabet was found."""

    def __init__(self, offset: int, char: str, line: int | None = None):
        self.offset = offset
        self.char = char
        self.line = line
        where = f"offset {offset}" if line is None else f"line {line}, offset {offset}"
        super().__init__(f"unexpected character {char!r} at {where}")


@dataclass(frozen=True)
class BinarySequence:
    """A finite sequence ``(e_1, ..., e_N)`` over {-1, +1}.

    Construct with :meth:`from_bits` or :meth:`from_values`; the raw
    constructor takes the packed byte payload.
    """

    length: int
    packed: bytes

    def __post_init__(self):
        if self.length < 1:
            raise InvalidLengthError("sequence length must be positive")
        if len(self.packed) != (self.length + 7) // 8:
            raise ValueError("packed payload does not match length")

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> "BinarySequence":
        arr = np.asarray(bits, dtype=np.uint8).ravel()
        if arr.size == 0:
            raise InvalidLengthError("sequence length must be positive")
        if np.any(arr > 1):
            raise ValueError("bits must be 0 or 1")
        return cls(int(arr.size), np.packbits(arr, bitorder="little").tobytes())

    @classmethod
    def from_values(cls, values: Iterable[int] | np.ndarray) -> "BinarySequence":
        arr = np.asarray(values).ravel()
        if arr.size and not np.all((arr == 1) | (arr == -1)):
            raise ValueError("symbols must be -1 or +1")
        return cls.from_bits(arr > 0)

    @cached_property
    def bits(self) -> np.ndarray:
        """Read-only uint8 array of 0/1 symbols (0-indexed)."""
        raw = np.frombuffer(self.packed, dtype=np.uint8)
        out = np.unpackbits(raw, count=self.length, bitorder="little")
        out.flags.writeable = False
        return out

    @cached_property
    def values(self) -> np.ndarray:
        """Read-only int8 array of -1/+1 symbols (0-indexed)."""
        out = self.bits.astype(np.int8) * 2 - 1
        out.flags.writeable = False
        return out

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, n: int) -> int:
        """1-indexed element access ``e_n``."""
        if not isinstance(n, (int, np.integer)):
            raise TypeError("element access takes a single integer index")
        if not 1 <= n <= self.length:
            raise IndexError(f"index {n} outside 1..{self.length}")
        return int(self.values[n - 1])

    def __iter__(self) -> Iterator[int]:
        return iter(self.values.tolist())

    def prefix(self, length: int) -> "BinarySequence":
        return BinarySequence.from_bits(self.bits[:length])

    def truncate(self, d: int) -> "BinarySequence":
        """Largest prefix whose length is a multiple of ``d``."""
        keep = (self.length // d) * d
        if keep == 0:
            raise InvalidLengthError(f"sequence shorter than block length {d}")
        return self.prefix(keep)

    def __repr__(self) -> str:
        body = render_sequence(self, "plus-minus")
        if len(body) > 40:
            body = body[:37] + "..."
        return f"BinarySequence(N={self.length}, {body})"


@dataclass(frozen=True)
class Pattern:
    """A word ``X = (x_1, ..., x_k)`` over {-1, +1}.

    Bit ``j`` of ``code`` holds ``x_{j+1}`` (1 means +1).
    """

    k: int
    code: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("pattern length must be at least 1")
        if not 0 <= self.code < (1 << self.k):
            raise ValueError(f"code {self.code} out of range for k={self.k}")

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "Pattern":
        code = 0
        for j, v in enumerate(values):
            if v not in (1, -1):
                raise ValueError("symbols must be -1 or +1")
            if v == 1:
                code |= 1 << j
        return cls(len(values), code)

    @classmethod
    def from_string(cls, text: str) -> "Pattern":
        """Parse ``"+-+"`` or ``"101"`` (first character is ``x_1``)."""
        mapping = {"+": 1, "1": 1, "-": -1, "0": -1}
        return cls.from_values([mapping[c] for c in text])

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(1 if (self.code >> j) & 1 else -1 for j in range(self.k))

    def negate(self) -> "Pattern":
        return Pattern(self.k, self.code ^ ((1 << self.k) - 1))

    def __str__(self) -> str:
        return "".join("+" if v == 1 else "-" for v in self.values)


@dataclass(frozen=True)
class SeedSpec:
    """Key of one independent random stream."""

    base_seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        for name in ("base_seed", "stream_index"):
            value = getattr(self, name)
            if not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        """Philox generator keyed by ``(base_seed, stream_index)``."""
        key = np.array([self.base_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, stream_index: int) -> "SeedSpec":
        return SeedSpec(self.base_seed, stream_index)


def random_bits(N: int, seed: SeedSpec) -> np.ndarray:
    """Fair 0/1 bits from the raw Philox output of ``seed``'s stream.

    Bit ``i`` is bit ``i % 64`` of the ``i // 64``-th raw 64-bit word, so the
    result does not depend on platform endianness or numpy's sampling
    routines.
    """
    if N < 1:
        raise InvalidLengthError("sequence length must be positive")
    bitgen = seed.generator().bit_generator
    words = np.asarray(bitgen.random_raw((N + 63) // 64), dtype="<u8")
    return np.unpackbits(words.view(np.uint8), count=N, bitorder="little")


def random_sequence(N: int, seed: SeedSpec) -> BinarySequence:
    """Uniformly random element of {-1, +1}^N, a pure function of ``(N, seed)``."""
    return BinarySequence.from_bits(random_bits(N, seed))


_ALPHABETS = {
    "zero-one": {"1": 1, "0": 0},
    "plus-minus": {"+": 1, "-": 0},
}


def parse_sequence(text: str, format: str = "zero-one") -> BinarySequence:
    """Parse one sequence; whitespace is ignored.

    Raises :class:`SequenceParseError` carrying the 0-based character
    offset of the first foreign symbol.
    """
    try:
        alphabet = _ALPHABETS[format]
    except KeyError:
        raise ValueError(f"unknown format {format!r}") from None
    bits = []
    for offset, char in enumerate(text):
        if char.isspace():
            continue
        try:
            bits.append(alphabet[char])
        except KeyError:
            raise SequenceParseError(offset, char) from None
    if not bits:
        raise InvalidLengthError("empty sequence payload")
    return BinarySequence.from_bits(bits)


def render_sequence(E: BinarySequence, format: str = "zero-one") -> str:
    if format == "zero-one":
        chars = np.array(["0", "1"])
    elif format == "plus-minus":
        chars = np.array(["-", "+"])
    else:
        raise ValueError(f"unknown format {format!r}")
    return "".join(chars[E.bits])


def read_sequences(lines: Iterable[str], format: str = "zero-one") -> Iterator[BinarySequence]:
    """Yield one sequence per non-blank line; LF and CRLF both accepted.

    Parse errors are re-raised with the 1-based line number attached.
    """
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        try:
            yield parse_sequence(line, format)
        except SequenceParseError as exc:
            raise SequenceParseError(exc.offset, exc.char, line=lineno) from None


def negate(E: BinarySequence) -> BinarySequence:
    return BinarySequence.from_bits(1 - E.bits)
