"""Self-consistency constraints on box parties.

A constrained party's output is fed back as its own input, so only the
outcomes with ``output[i] == input[i]`` for every constrained party i
survive.  Each input row is conditioned on that event and renormalized.
A row whose surviving mass is zero is a paradox row: the box admits no
self-consistent outcome there.  Paradox rows are kept as explicit data
rather than raised as errors, since which rows they are is exactly what
the analysis downstream needs.

For a parity box with constraint XOR(outputs) = f(inputs), substituting
the forced bits turns each surviving row into the induced relation

    XOR(unconstrained outputs) = f(inputs) ^ XOR(constrained inputs)

which `induced_parity_form` computes symbolically; the table built by
`constrain` realizes the same relation outcome by outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .boxes import NoSignalBox
from .forms import BooleanForm


def normalize_pattern(n: int, pattern: Iterable[int]) -> tuple[int, ...]:
    """Sorted, deduplicated party indices, validated against n."""
    pat = tuple(sorted({int(i) for i in pattern}))
    for i in pat:
        if not 0 <= i < n:
            raise ValueError(f"party index {i} out of range for {n} parties")
    return pat


@dataclass(frozen=True)
class ConstrainedRow:
    """Renormalized outcomes for one input tuple; empty iff paradox."""

    inputs: tuple[int, ...]
    outcomes: dict[tuple[int, ...], Fraction]
    paradox: bool


class ConstrainedBox:
    """A box conditioned on output == input for a set of parties."""

    def __init__(self, box: NoSignalBox, pattern: Iterable[int]):
        self.box = box
        self.n = box.n
        self.pattern = normalize_pattern(box.n, pattern)
        self.free = tuple(i for i in range(box.n) if i not in self.pattern)
        rows: dict[tuple[int, ...], ConstrainedRow] = {}
        for inputs, row in box.rows.items():
            kept = {out: p for out, p in row.items()
                    if all(out[i] == inputs[i] for i in self.pattern)}
            mass = sum(kept.values(), Fraction(0))
            if mass == 0:
                rows[inputs] = ConstrainedRow(inputs, {}, True)
            else:
                rows[inputs] = ConstrainedRow(
                    inputs, {out: p / mass for out, p in kept.items()}, False)
        self.rows = rows

    @property
    def paradox_inputs(self) -> list[tuple[int, ...]]:
        return [inputs for inputs in sorted(self.rows)
                if self.rows[inputs].paradox]

    def prob(self, inputs: Iterable[int], outputs: Iterable[int]) -> Fraction:
        """Conditioned p(outputs | inputs); zero on paradox rows."""
        return self.rows[tuple(inputs)].outcomes.get(tuple(outputs), Fraction(0))

    def deterministic_map(self) -> dict[tuple[int, ...], tuple[int, ...]] | None:
        """inputs -> outputs when every row has exactly one outcome, else None."""
        mapping = {}
        for inputs in sorted(self.rows):
            row = self.rows[inputs]
            if row.paradox or len(row.outcomes) != 1:
                return None
            (out,) = row.outcomes
            mapping[inputs] = out
        return mapping

    def __repr__(self) -> str:
        return (f"ConstrainedBox({self.box!r}, pattern={self.pattern}, "
                f"paradoxes={len(self.paradox_inputs)})")


def constrain(box: NoSignalBox, pattern: Iterable[int]) -> ConstrainedBox:
    """Condition `box` on self-consistency for the given parties."""
    return ConstrainedBox(box, pattern)


def induced_parity_form(form: BooleanForm, pattern: Iterable[int]) -> BooleanForm:
    """Relation on the unconstrained outputs after forcing output == input.

    Returns g with XOR(unconstrained outputs) = g(inputs), namely
    f ^ x_i for each constrained party i.  When every party is
    constrained the left side is empty, so g(inputs) = 0 is the row's
    consistency condition and g(inputs) = 1 marks a paradox row.
    """
    pat = normalize_pattern(form.n, pattern)
    g = form
    for i in pat:
        g = g ^ BooleanForm.variable(form.n, i)
    return g


def constrained_to_json(cbox: ConstrainedBox) -> list[dict]:
    """Rows as JSON-ready dicts with exact "num/den" probability strings."""
    out = []
    for inputs in sorted(cbox.rows):
        row = cbox.rows[inputs]
        out.append({
            "inputs": list(inputs),
            "outcomes": [{"out": list(outcome), "p": str(p)}
                         for outcome, p in sorted(row.outcomes.items())],
            "paradox": row.paradox,
        })
    return out


def parse_pattern(n: int, spec: Iterable) -> tuple[int, ...]:
    """Pattern from party names or indices ('alice', 1, 'charlie', ...)."""
    from .forms import PARTY_NAMES
    indices = []
    for item in spec:
        if isinstance(item, str):
            name = item.strip().lower()
            if name in PARTY_NAMES:
                indices.append(PARTY_NAMES.index(name))
                continue
            if name.isdigit():
                indices.append(int(name))
                continue
            raise ValueError(f"unknown party {item!r}; "
                             f"use an index or one of {', '.join(PARTY_NAMES)}")
        else:
            indices.append(int(item))
    return normalize_pattern(n, indices)


def uniform_row_counts(cbox: ConstrainedBox) -> dict[tuple[int, ...], int]:
    """Outcome count per non-paradox row; handy for uniformity checks."""
    return {inputs: len(cbox.rows[inputs].outcomes)
            for inputs in sorted(cbox.rows) if not cbox.rows[inputs].paradox}
