"""Multilinear GF(2) forms over party input bits.

A form is an XOR of AND-monomials, each monomial a set of party indices.
These forms are the right-hand sides of the parity constraints that define
the correlation boxes in this package: XOR of all outputs == form(inputs).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

INPUT_NAMES = ("x", "y", "z")
OUTPUT_NAMES = ("a", "b", "c")
PARTY_NAMES = ("alice", "bob", "charlie")


def as_bit(value: int) -> int:
    """Check that ``value`` is 0 or 1 and return it as a plain int."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int) and value in (0, 1):
        return value
    raise ValueError(f"expected a bit (0 or 1), got {value!r}")


def xor_bits(bits: Iterable[int]) -> int:
    out = 0
    for b in bits:
        out ^= b
    return out


def input_names(n: int) -> tuple[str, ...]:
    """Input symbols for an n-party box (x, y, z up to three parties)."""
    if n <= len(INPUT_NAMES):
        return INPUT_NAMES[:n]
    return tuple(f"x{i}" for i in range(n))


def output_names(n: int) -> tuple[str, ...]:
    """Output symbols for an n-party box (a, b, c up to three parties)."""
    if n <= len(OUTPUT_NAMES):
        return OUTPUT_NAMES[:n]
    return tuple(f"a{i}" for i in range(n))


def party_names(n: int) -> tuple[str, ...]:
    """Party labels (alice, bob, charlie up to three parties)."""
    if n <= len(PARTY_NAMES):
        return PARTY_NAMES[:n]
    return tuple(f"party{i}" for i in range(n))


@dataclass(frozen=True)
class BooleanForm:
    """Multilinear polynomial over GF(2) in ``n`` input bits.

    ``monomials`` holds frozensets of party indices; each one is an AND
    monomial and the polynomial is their XOR.  The empty monomial is the
    constant 1, and an empty monomial set is the constant 0.

    >>> f = BooleanForm.from_monomials(2, [[0, 1]])   # x.y
    >>> [f.evaluate(bits) for bits in ((0, 0), (0, 1), (1, 0), (1, 1))]
    [0, 0, 0, 1]
    """

    n: int
    monomials: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a form needs at least one party")
        for mono in self.monomials:
            for index in mono:
                if not 0 <= index < self.n:
                    raise ValueError(
                        f"monomial index {index} out of range for {self.n} parties")

    @classmethod
    def from_monomials(cls, n: int, monomials: Iterable[Iterable[int]]) -> "BooleanForm":
        """Build a form from monomial index lists, cancelling repeats mod 2."""
        acc: set[frozenset[int]] = set()
        for mono in monomials:
            acc ^= {frozenset(int(i) for i in mono)}
        return cls(n, frozenset(acc))

    @classmethod
    def zero(cls, n: int) -> "BooleanForm":
        return cls(n, frozenset())

    @classmethod
    def one(cls, n: int) -> "BooleanForm":
        return cls(n, frozenset({frozenset()}))

    @classmethod
    def variable(cls, n: int, index: int) -> "BooleanForm":
        if not 0 <= index < n:
            raise ValueError(f"index {index} out of range for {n} parties")
        return cls(n, frozenset({frozenset({index})}))

    def __xor__(self, other: "BooleanForm") -> "BooleanForm":
        if self.n != other.n:
            raise ValueError("cannot combine forms over different party counts")
        return BooleanForm(self.n, self.monomials ^ other.monomials)

    def evaluate(self, inputs: Sequence[int]) -> int:
        return evaluate_form(self, inputs)

    def sorted_monomials(self) -> list[tuple[int, ...]]:
        """Monomials in canonical order: by degree, then by indices."""
        return sorted((tuple(sorted(m)) for m in self.monomials),
                      key=lambda m: (len(m), m))

    def render(self, names: Sequence[str] | None = None) -> str:
        """Readable rendering such as ``x.y ^ x.z`` (``^`` is XOR, ``.`` AND)."""
        if names is None:
            names = input_names(self.n)
        terms = []
        for mono in sorted(self.monomials, key=lambda m: (-len(m), tuple(sorted(m)))):
            terms.append(".".join(names[i] for i in sorted(mono)) if mono else "1")
        return " ^ ".join(terms) if terms else "0"

    def __str__(self) -> str:
        return self.render()


def evaluate_form(form: BooleanForm, inputs: Sequence[int]) -> int:
    """Evaluate a GF(2) form on a full tuple of input bits."""
    if len(inputs) != form.n:
        raise ValueError(f"form expects {form.n} inputs, got {len(inputs)}")
    bits = tuple(as_bit(b) for b in inputs)
    value = 0
    for mono in form.monomials:
        term = 1
        for index in mono:
            term &= bits[index]
        value ^= term
    return value
