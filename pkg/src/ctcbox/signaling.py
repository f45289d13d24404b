"""Detect and quantify signaling created by self-consistency constraints.

The scenario: one party (the sender) encodes a bit in its input choice,
a disjoint coalition of receivers fixes its own inputs (the setting) and
observes only its own outputs.  Inputs of any remaining parties are
averaged uniformly, since the receivers have no access to them.  The
sender's two input values then induce two observation distributions for
each setting; signaling happens exactly when they differ.

Three measures are reported per setting and shown to agree in kind:
an exact distribution comparison (``dependent``), the exact success
probability of the best guessing rule given a uniformly random sender
bit, and the mutual information of the induced channel in bits.  The
best rule picks the sender bit with the larger likelihood for each
observed output tuple, guessing 0 on ties; its success probability
exceeds 1/2 iff the distributions differ iff the information is
positive.

Some settings show perfectly correlated receiver outputs whose shared
parity is fixed by the setting alone.  Such correlations look striking
but carry nothing, because they are identical for both sender inputs;
entries flag this with an explanatory note.  An entry is also flagged
``impractical`` when the coalition overlaps the constrained parties,
since those outputs sit inside a feedback loop and the scenario is not
an ordinary distant-laboratory measurement.

Summaries state dependence counts in both common conventions: per
receiver setting, and per (setting, sender bit) case, which doubles the
totals for a binary sender.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .boxes import all_bit_tuples
from .ctc import ConstrainedBox
from .forms import party_names, xor_bits


def entropy_bits(dist: Mapping[tuple, Fraction]) -> float:
    """Shannon entropy of a distribution in bits; zero entries are ignored."""
    total = 0.0
    for p in dist.values():
        if p > 0:
            x = float(p)
            total -= x * math.log2(x)
    return total


def _check_scenario(cbox: ConstrainedBox, sender: int,
                    coalition: tuple[int, ...]) -> tuple[int, ...]:
    n = cbox.n
    if not 0 <= sender < n:
        raise ValueError(f"sender index {sender} out of range for {n} parties")
    coal = tuple(sorted({int(i) for i in coalition}))
    if not coal:
        raise ValueError("receiver coalition must be nonempty")
    for i in coal:
        if not 0 <= i < n:
            raise ValueError(f"party index {i} out of range for {n} parties")
    if sender in coal:
        raise ValueError("sender cannot be part of the receiver coalition")
    return coal


def receiver_observation(cbox: ConstrainedBox, sender: int,
                         coalition: Iterable[int], setting: Iterable[int],
                         sender_value: int) -> dict[tuple[int, ...], Fraction]:
    """Distribution of the coalition's outputs for one sender input value.

    The coalition's inputs are pinned to ``setting``; inputs of parties
    outside coalition and sender are averaged uniformly.  Raises on
    paradox rows, where observation statistics are undefined.
    """
    coal = _check_scenario(cbox, sender, tuple(coalition))
    setting = tuple(setting)
    if len(setting) != len(coal):
        raise ValueError(f"setting must give one bit per coalition party")
    bystanders = [i for i in range(cbox.n) if i != sender and i not in coal]
    weight = Fraction(1, 2 ** len(bystanders))
    obs: dict[tuple[int, ...], Fraction] = {}
    for extra in all_bit_tuples(len(bystanders)):
        full = [0] * cbox.n
        full[sender] = sender_value
        for i, b in zip(coal, setting):
            full[i] = b
        for i, b in zip(bystanders, extra):
            full[i] = b
        row = cbox.rows[tuple(full)]
        if row.paradox:
            raise ValueError(
                f"observation undefined: paradox row at inputs {tuple(full)}")
        for out, p in row.outcomes.items():
            key = tuple(out[i] for i in coal)
            obs[key] = obs.get(key, Fraction(0)) + weight * p
    return obs


def map_rule(p0: Mapping[tuple, Fraction],
             p1: Mapping[tuple, Fraction]) -> dict[tuple[int, ...], int]:
    """Most-likely sender bit for each observable outcome, ties going to 0."""
    rule = {}
    for out in sorted(set(p0) | set(p1)):
        rule[out] = 1 if p1.get(out, 0) > p0.get(out, 0) else 0
    return rule


def success_probability(p0: Mapping[tuple, Fraction],
                        p1: Mapping[tuple, Fraction]) -> Fraction:
    """Exact success of the best rule for a uniformly random sender bit."""
    total = Fraction(0)
    for out in set(p0) | set(p1):
        total += max(p0.get(out, Fraction(0)), p1.get(out, Fraction(0)))
    return total / 2


def rule_success(rule: Mapping[tuple, int], p0: Mapping[tuple, Fraction],
                 p1: Mapping[tuple, Fraction]) -> Fraction:
    """Exact success of an arbitrary guessing rule; unmapped outcomes guess 0."""
    total = Fraction(0)
    for out, p in p0.items():
        if rule.get(out, 0) == 0:
            total += p
    for out, p in p1.items():
        if rule.get(out, 0) == 1:
            total += p
    return total / 2


def mutual_information_bits(p0: Mapping[tuple, Fraction],
                            p1: Mapping[tuple, Fraction]) -> float:
    """I(sender bit; observation) with a uniform sender bit, in bits."""
    mix = {}
    for out in set(p0) | set(p1):
        mix[out] = (p0.get(out, Fraction(0)) + p1.get(out, Fraction(0))) / 2
    return entropy_bits(mix) - (entropy_bits(p0) + entropy_bits(p1)) / 2


def _parity_note(p0: Mapping[tuple, Fraction],
                 p1: Mapping[tuple, Fraction]) -> str | None:
    support = set(p0) | set(p1)
    parities = {xor_bits(out) for out in support}
    if len(parities) != 1:
        return None
    parity = parities.pop()
    return (f"receiver outputs always satisfy XOR = {parity} here for either "
            f"sender input, so the correlation is fixed by the setting and "
            f"carries no information")


@dataclass(frozen=True)
class SignalingEntry:
    """Analysis of one receiver setting for a fixed sender and coalition."""

    sender: int
    coalition: tuple[int, ...]
    setting: tuple[int, ...]
    dependent: bool
    rule: dict[tuple[int, ...], int]
    success: Fraction
    mi_bits: float
    impractical: bool
    note: str | None


def analyze_setting(cbox: ConstrainedBox, sender: int,
                    coalition: Iterable[int],
                    setting: Iterable[int]) -> SignalingEntry:
    coal = _check_scenario(cbox, sender, tuple(coalition))
    setting = tuple(setting)
    p0 = receiver_observation(cbox, sender, coal, setting, 0)
    p1 = receiver_observation(cbox, sender, coal, setting, 1)
    dependent = p0 != p1
    note = None if dependent else _parity_note(p0, p1)
    return SignalingEntry(
        sender=sender,
        coalition=coal,
        setting=setting,
        dependent=dependent,
        rule=map_rule(p0, p1),
        success=success_probability(p0, p1),
        mi_bits=mutual_information_bits(p0, p1),
        impractical=bool(set(coal) & set(cbox.pattern)),
        note=note,
    )


def analyze(cbox: ConstrainedBox, sender: int,
            coalition: Iterable[int]) -> list[SignalingEntry]:
    """One entry per receiver setting, settings in lexicographic order."""
    coal = _check_scenario(cbox, sender, tuple(coalition))
    return [analyze_setting(cbox, sender, coal, setting)
            for setting in all_bit_tuples(len(coal))]


def mean_mi_bits(entries: Iterable[SignalingEntry]) -> float:
    """Average per-setting information, receivers choosing settings uniformly."""
    entries = list(entries)
    if not entries:
        raise ValueError("no entries to average")
    return sum(e.mi_bits for e in entries) / len(entries)


def full_scan(cbox: ConstrainedBox) -> list[tuple[int, tuple[int, ...],
                                                  list[SignalingEntry]]]:
    """Entries for every sender and every coalition of the remaining parties.

    Directions are ordered by sender, then coalition size, then coalition
    indices; an unconstrained no-signaling box yields no dependent entry
    anywhere.
    """
    results = []
    n = cbox.n
    for sender in range(n):
        others = [i for i in range(n) if i != sender]
        for size in range(1, n):
            for coalition in combinations(others, size):
                results.append((sender, coalition,
                                analyze(cbox, sender, coalition)))
    return results


def _count_summary(entries: list[SignalingEntry]) -> dict:
    """Both counting conventions: settings, and (setting, sender bit) cases."""
    dependent = sum(1 for e in entries if e.dependent)
    return {
        "settings": len(entries),
        "dependent_settings": dependent,
        "cases": 2 * len(entries),
        "dependent_cases": 2 * dependent,
    }


def entry_to_json(entry: SignalingEntry, n: int) -> dict:
    names = party_names(n)
    return {
        "sender": names[entry.sender],
        "coalition": [names[i] for i in entry.coalition],
        "setting": list(entry.setting),
        "dependent": entry.dependent,
        "rule": {"".join(map(str, out)): guess
                 for out, guess in sorted(entry.rule.items())},
        "success": str(entry.success),
        "mi_bits": entry.mi_bits,
        "impractical": entry.impractical,
        "note": entry.note,
    }


def report_json(box_label: str, cbox: ConstrainedBox, sender: int,
                coalition: Iterable[int]) -> dict:
    """Full signaling report for one sender/coalition pair as a JSON dict."""
    coal = _check_scenario(cbox, sender, tuple(coalition))
    entries = analyze(cbox, sender, coal)
    names = party_names(cbox.n)
    summary = _count_summary(entries)
    summary["impractical"] = bool(set(coal) & set(cbox.pattern))
    summary["max_success"] = str(max(e.success for e in entries))
    summary["mean_mi_bits"] = mean_mi_bits(entries)
    return {
        "box": box_label,
        "ctc": [names[i] for i in cbox.pattern],
        "sender": names[sender],
        "coalition": [names[i] for i in coal],
        "entries": [entry_to_json(e, cbox.n) for e in entries],
        "summary": summary,
    }


def scan_report_json(box_label: str, cbox: ConstrainedBox) -> dict:
    """Reports for every direction, with overall dependence counts."""
    names = party_names(cbox.n)
    reports = []
    all_entries: list[SignalingEntry] = []
    dependent_directions = 0
    for sender, coalition, entries in full_scan(cbox):
        all_entries.extend(entries)
        summary = _count_summary(entries)
        summary["impractical"] = bool(set(coalition) & set(cbox.pattern))
        dependent_directions += any(e.dependent for e in entries)
        reports.append({
            "sender": names[sender],
            "coalition": [names[i] for i in coalition],
            "entries": [entry_to_json(e, cbox.n) for e in entries],
            "summary": summary,
        })
    overall = _count_summary(all_entries)
    overall["directions"] = len(reports)
    overall["dependent_directions"] = dependent_directions
    return {
        "box": box_label,
        "ctc": [names[i] for i in cbox.pattern],
        "reports": reports,
        "summary": overall,
    }
