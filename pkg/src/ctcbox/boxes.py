"""Exact conditional-probability tables for n-party binary boxes.

Every party feeds one input bit into the box and receives one output bit.
A box is the table p(outputs | inputs) with exact rational entries, so the
no-signaling checks and the reference tables downstream are bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Mapping

from .forms import BooleanForm, as_bit, evaluate_form, input_names, output_names, xor_bits

CHSH_CLASSICAL_BOUND = Fraction(2)
CHSH_TSIRELSON_BOUND = 2 * math.sqrt(2)


def all_bit_tuples(n: int) -> list[tuple[int, ...]]:
    """All length-n bit tuples in lexicographic order."""
    return list(product((0, 1), repeat=n))


def exact_fraction(value) -> Fraction:
    """Coerce a probability to an exact Fraction; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(
        f"probabilities must be exact (Fraction, int or 'num/den' string), "
        f"got {type(value).__name__}")


class NoSignalBox:
    """Conditional distribution p(outputs | inputs) for n binary parties.

    Rows are stored sparsely: only outcomes with positive probability
    appear.  Probabilities are exact Fractions and every row must sum to
    exactly 1.  Instances are treated as immutable once built; two boxes
    compare equal iff their tables agree entry for entry.

    ``form`` records the parity constraint the box was built from, when
    there is one; boxes loaded from explicit tables carry ``form=None``.
    """

    def __init__(self, n: int, rows: Mapping, *, form: BooleanForm | None = None,
                 label: str | None = None):
        if n < 1:
            raise ValueError("a box needs at least one party")
        table: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
        for inputs in all_bit_tuples(n):
            if inputs not in rows:
                raise ValueError(f"missing row for inputs {inputs}")
            row: dict[tuple[int, ...], Fraction] = {}
            total = Fraction(0)
            for outputs, value in rows[inputs].items():
                out = tuple(as_bit(b) for b in outputs)
                if len(out) != n:
                    raise ValueError(
                        f"outputs {out} for inputs {inputs} have wrong arity")
                p = exact_fraction(value)
                if p < 0:
                    raise ValueError(
                        f"negative probability {p} at inputs {inputs}, outputs {out}")
                total += p
                if p > 0:
                    if out in row:
                        raise ValueError(
                            f"duplicate outcome {out} for inputs {inputs}")
                    row[out] = p
            if total != 1:
                raise ValueError(
                    f"probabilities for inputs {inputs} sum to {total}, expected 1")
            table[inputs] = row
        extra = [key for key in rows if key not in table]
        if extra:
            raise ValueError(f"unexpected input tuples: {extra[:3]}")
        self.n = n
        self.rows = table
        self.form = form
        self.label = label

    def prob(self, inputs: Iterable[int], outputs: Iterable[int]) -> Fraction:
        """p(outputs | inputs); zero for outcomes absent from the table."""
        return self.rows[tuple(inputs)].get(tuple(outputs), Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, NoSignalBox):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    __hash__ = None

    def __repr__(self) -> str:
        tag = self.label or (self.form.render() if self.form else "table")
        return f"NoSignalBox(n={self.n}, {tag})"


def parity_box(form: BooleanForm, *, label: str | None = None) -> NoSignalBox:
    """Box whose outputs are uniform over {XOR(outputs) == form(inputs)}.

    Every input row has 2**(n-1) equiprobable outcomes of weight
    1/2**(n-1); the construction is a pure function of the form.
    """
    n = form.n
    if n < 2:
        raise ValueError("parity boxes need at least 2 parties")
    weight = Fraction(1, 2 ** (n - 1))
    rows = {}
    for inputs in all_bit_tuples(n):
        rhs = evaluate_form(form, inputs)
        rows[inputs] = {out: weight for out in all_bit_tuples(n)
                        if xor_bits(out) == rhs}
    return NoSignalBox(n, rows, form=form, label=label)


class BoxName(str, Enum):
    PR = "pr"
    SVETLICHNY = "svetlichny"
    MERMIN1 = "mermin1"
    MERMIN2 = "mermin2"


NAMED_FORMS: dict[BoxName, BooleanForm] = {
    BoxName.PR: BooleanForm.from_monomials(2, [[0, 1]]),
    BoxName.SVETLICHNY: BooleanForm.from_monomials(3, [[0, 1], [1, 2], [2, 0]]),
    BoxName.MERMIN1: BooleanForm.from_monomials(3, [[0, 1], [0, 2]]),
    BoxName.MERMIN2: BooleanForm.from_monomials(3, [[0, 1, 2]]),
}


def named_box(name: BoxName | str) -> NoSignalBox:
    """One of the built-in parity boxes: pr, svetlichny, mermin1, mermin2."""
    if isinstance(name, str) and not isinstance(name, BoxName):
        try:
            name = BoxName(name.lower())
        except ValueError:
            raise ValueError(f"unknown box name {name!r}; "
                             f"known: {', '.join(b.value for b in BoxName)}") from None
    return parity_box(NAMED_FORMS[name], label=name.value)


def parity_equation(form: BooleanForm) -> str:
    """The defining constraint as text, e.g. ``a ^ b = x.y``."""
    lhs = " ^ ".join(output_names(form.n))
    return f"{lhs} = {form.render(input_names(form.n))}"


@dataclass(frozen=True)
class MarginalDistribution:
    """Output distribution of a coalition of parties at fixed full inputs."""

    coalition: tuple[int, ...]
    inputs: tuple[int, ...]
    probs: dict[tuple[int, ...], Fraction]


def _normalize_coalition(n: int, coalition: Iterable[int]) -> tuple[int, ...]:
    coal = tuple(sorted({int(i) for i in coalition}))
    if not coal:
        raise ValueError("coalition must be nonempty")
    for i in coal:
        if not 0 <= i < n:
            raise ValueError(f"party index {i} out of range for {n} parties")
    return coal


def marginal(box: NoSignalBox, coalition: Iterable[int],
             inputs: Iterable[int]) -> MarginalDistribution:
    """Sum the box row over the outputs of parties outside the coalition."""
    coal = _normalize_coalition(box.n, coalition)
    full = tuple(as_bit(b) for b in inputs)
    if len(full) != box.n:
        raise ValueError(f"expected {box.n} inputs, got {len(full)}")
    probs: dict[tuple[int, ...], Fraction] = {}
    for outputs, p in box.rows[full].items():
        key = tuple(outputs[i] for i in coal)
        probs[key] = probs.get(key, Fraction(0)) + p
    return MarginalDistribution(coal, full, probs)


@dataclass(frozen=True)
class SignalingWitness:
    """Two input tuples agreeing on the coalition but with different marginals."""

    coalition: tuple[int, ...]
    inputs_a: tuple[int, ...]
    inputs_b: tuple[int, ...]
    marginal_a: dict[tuple[int, ...], Fraction]
    marginal_b: dict[tuple[int, ...], Fraction]


@dataclass(frozen=True)
class NoSignalingVerdict:
    ok: bool
    witness: SignalingWitness | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_no_signaling(box: NoSignalBox) -> NoSignalingVerdict:
    """Exhaustive marginal-independence check over every proper coalition.

    For each coalition R and each fixing of R's inputs, the marginal of
    R's outputs must not depend on the remaining parties' inputs.  The
    scan is deterministic (coalitions by size then lexicographically,
    completions lexicographically) so the first witness found is the
    lexicographically smallest one.
    """
    n = box.n
    for size in range(1, n):
        for coalition in combinations(range(n), size):
            others = [i for i in range(n) if i not in coalition]
            for r_inputs in all_bit_tuples(size):
                completions = all_bit_tuples(len(others))
                base = _assemble_inputs(n, coalition, r_inputs, others, completions[0])
                base_marg = marginal(box, coalition, base)
                for completion in completions[1:]:
                    trial = _assemble_inputs(n, coalition, r_inputs, others, completion)
                    trial_marg = marginal(box, coalition, trial)
                    if trial_marg.probs != base_marg.probs:
                        return NoSignalingVerdict(False, SignalingWitness(
                            coalition, base, trial,
                            base_marg.probs, trial_marg.probs))
    return NoSignalingVerdict(True)


def _assemble_inputs(n, coalition, coalition_bits, others, other_bits) -> tuple[int, ...]:
    full = [0] * n
    for i, b in zip(coalition, coalition_bits):
        full[i] = b
    for i, b in zip(others, other_bits):
        full[i] = b
    return tuple(full)


def chsh_value(box: NoSignalBox) -> Fraction:
    """E(0,0) + E(0,1) + E(1,0) - E(1,1) for a two-party box.

    E(x,y) is the parity correlator sum_{a,b} (-1)^(a^b) p(a,b|x,y).
    Classical strategies reach 2 (CHSH_CLASSICAL_BOUND), quantum ones
    2*sqrt(2) (CHSH_TSIRELSON_BOUND); the pr box reaches 4.
    """
    if box.n != 2:
        raise ValueError("the CHSH functional is defined for 2-party boxes")

    def correlator(x: int, y: int) -> Fraction:
        total = Fraction(0)
        for (a, b), p in box.rows[(x, y)].items():
            total += p if (a ^ b) == 0 else -p
        return total

    return (correlator(0, 0) + correlator(0, 1)
            + correlator(1, 0) - correlator(1, 1))


class BoxSpecError(ValueError):
    """Raised when a box spec document fails validation."""


def box_to_spec(box: NoSignalBox) -> dict:
    """JSON-ready spec: a constraint spec for parity boxes, else a table spec.

    Probabilities are serialized as "num/den" strings to stay exact.
    """
    if box.form is not None:
        return {"parties": box.n,
                "constraint": [list(m) for m in box.form.sorted_monomials()]}
    entries = []
    for inputs in sorted(box.rows):
        for outputs in sorted(box.rows[inputs]):
            entries.append({"in": list(inputs), "out": list(outputs),
                            "p": str(box.rows[inputs][outputs])})
    return {"parties": box.n, "table": entries}


def box_from_spec(data, *, label: str | None = None) -> NoSignalBox:
    """Build a validated box from a spec dict (see ``box_to_spec``)."""
    if not isinstance(data, dict):
        raise BoxSpecError("box spec must be a JSON object")
    parties = data.get("parties")
    if not isinstance(parties, int) or isinstance(parties, bool) or parties < 1:
        raise BoxSpecError("field 'parties' must be a positive integer")
    has_constraint = "constraint" in data
    has_table = "table" in data
    if has_constraint == has_table:
        raise BoxSpecError("box spec needs exactly one of 'constraint' or 'table'")
    if has_constraint:
        monomials = data["constraint"]
        if not isinstance(monomials, list):
            raise BoxSpecError("field 'constraint' must be a list of index lists")
        for k, mono in enumerate(monomials):
            if not isinstance(mono, list) or not all(
                    isinstance(i, int) and not isinstance(i, bool) for i in mono):
                raise BoxSpecError(f"constraint[{k}] must be a list of party indices")
        try:
            form = BooleanForm.from_monomials(parties, monomials)
            return parity_box(form, label=label)
        except ValueError as err:
            raise BoxSpecError(f"constraint: {err}") from err
    entries = data["table"]
    if not isinstance(entries, list):
        raise BoxSpecError("field 'table' must be a list of entries")
    rows: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {
        inputs: {} for inputs in all_bit_tuples(parties)}
    for k, entry in enumerate(entries):
        where = f"table[{k}]"
        if not isinstance(entry, dict):
            raise BoxSpecError(f"{where}: entry must be an object")
        try:
            inputs = tuple(as_bit(b) for b in entry["in"])
            outputs = tuple(as_bit(b) for b in entry["out"])
            p = exact_fraction(entry["p"])
        except KeyError as err:
            raise BoxSpecError(f"{where}: missing field {err}") from err
        except (ValueError, TypeError, ZeroDivisionError) as err:
            raise BoxSpecError(f"{where}: {err}") from err
        if len(inputs) != parties or len(outputs) != parties:
            raise BoxSpecError(f"{where}: 'in' and 'out' must have {parties} bits")
        if inputs not in rows:
            raise BoxSpecError(f"{where}: bad input tuple {inputs}")
        if outputs in rows[inputs]:
            raise BoxSpecError(f"{where}: duplicate entry for {inputs} -> {outputs}")
        rows[inputs][outputs] = p
    try:
        return NoSignalBox(parties, rows, label=label)
    except ValueError as err:
        raise BoxSpecError(f"table: {err}") from err
