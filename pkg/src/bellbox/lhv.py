"""Deterministic attribute assignments and exact rational ensembles.

The classical side of the library: items carry three pre-assigned two-valued
properties (dark, round, swiss, each stored as a sign, +1 = has it), boxes
group items under a packing rule, and an ensemble is a rational-weighted
mixture of boxes.  Everything here is exact: weights and probabilities are
fractions.Fraction values, never floats, so statements like "equals 1/4" or
"the inequality holds" are decided by integer arithmetic.

Sign encoding makes three-way parity checks literal products: a triple of
attributes multiplies to +1 or -1 with no case analysis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

PROPERTIES = ("dark", "round", "swiss")

PARITY_PATTERNS = ("xyy", "yxy", "yyx", "xxx")

_PATTERN_LETTERS = {"x": "dark", "y": "round"}


def _checked_sign(value: int, name: str) -> int:
    # bool is an int subclass; keep True/False out of sign slots
    if isinstance(value, bool) or value not in (1, -1):
        raise ValueError(f"{name} must be +1 or -1, got {value!r}")
    return int(value)


def _checked_property(prop: str) -> str:
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}, expected one of {PROPERTIES}")
    return prop


@dataclass(frozen=True)
class AttributeTriple:
    """One item's three property signs."""

    dark: int
    round: int
    swiss: int

    def __post_init__(self):
        for name in PROPERTIES:
            _checked_sign(getattr(self, name), name)

    def get(self, prop: str) -> int:
        return getattr(self, _checked_property(prop))

    def negated(self) -> AttributeTriple:
        return AttributeTriple(-self.dark, -self.round, -self.swiss)


@dataclass(frozen=True)
class SingletBoxing:
    """Two-compartment box obeying the packing rule: compartment 2 is the
    attribute-wise opposite of compartment 1."""

    compartment1: AttributeTriple
    compartment2: AttributeTriple

    def __post_init__(self):
        if self.compartment2 != self.compartment1.negated():
            raise ValueError(
                "compartment 2 must be the attribute-wise opposite of compartment 1"
            )

    @classmethod
    def from_first(cls, triple: AttributeTriple) -> SingletBoxing:
        return cls(triple, triple.negated())


@dataclass(frozen=True)
class UnconstrainedBoxing:
    """Two-compartment box with no packing rule.

    Exists to show what the rule buys: without it, the two-compartment
    coincidence probability and its single-compartment rewrite come apart.
    """

    compartment1: AttributeTriple
    compartment2: AttributeTriple


@dataclass(frozen=True)
class GhzBoxing:
    """Three-compartment box; per-compartment dark and round signs, one shared
    swiss sign, constrained so that every mixed parity product
    dark_i * round_j * round_k (i, j, k distinct) equals +1."""

    dark: tuple[int, int, int]
    round: tuple[int, int, int]
    swiss: int

    def __post_init__(self):
        for name in ("dark", "round"):
            signs = getattr(self, name)
            if not (isinstance(signs, tuple) and len(signs) == 3):
                raise ValueError(f"{name} must be a tuple of 3 signs")
            for i, s in enumerate(signs):
                _checked_sign(s, f"{name}[{i}]")
        _checked_sign(self.swiss, "swiss")
        d, r = self.dark, self.round
        for prod in (d[0] * r[1] * r[2], r[0] * d[1] * r[2], r[0] * r[1] * d[2]):
            if prod != 1:
                raise ValueError("attribute signs violate the parity packing rule")

    def pattern_product(self, pattern: str) -> int:
        """Product of one attribute sign per compartment, chosen by letter:
        x = dark, y = round.  E.g. "xyy" multiplies dark(1), round(2), round(3)."""
        if len(pattern) != 3 or any(ch not in _PATTERN_LETTERS for ch in pattern):
            raise ValueError(f"pattern must be 3 letters from x/y, got {pattern!r}")
        out = 1
        for i, ch in enumerate(pattern):
            out *= getattr(self, _PATTERN_LETTERS[ch])[i]
        return out


@dataclass(frozen=True)
class Ensemble:
    """Mixture of boxings with positive exact-rational weights summing to 1.

    All boxings in one ensemble must be of the same kind; floats are rejected
    outright so exactness cannot erode silently.
    """

    entries: tuple[tuple[object, Fraction], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("ensemble needs at least one entry")
        normalized = []
        kind = type(self.entries[0][0])
        for boxing, weight in self.entries:
            if type(boxing) is not kind:
                raise ValueError("all boxings in an ensemble must have the same type")
            if isinstance(weight, float):
                raise ValueError("weights must be exact rationals, not floats")
            weight = Fraction(weight)
            if weight <= 0:
                raise ValueError(f"weights must be positive, got {weight}")
            normalized.append((boxing, weight))
        if sum(w for _, w in normalized) != 1:
            raise ValueError("weights must sum to exactly 1")
        object.__setattr__(self, "entries", tuple(normalized))

    @classmethod
    def from_counts(cls, pairs: Iterable[tuple[object, int]]) -> Ensemble:
        pairs = [(b, int(c)) for b, c in pairs]
        total = sum(c for _, c in pairs)
        return cls(tuple((b, Fraction(c, total)) for b, c in pairs if c > 0))

    @property
    def boxing_type(self) -> type:
        return type(self.entries[0][0])


def _all_triples() -> list[AttributeTriple]:
    return [
        AttributeTriple(d, r, s)
        for d in (1, -1)
        for r in (1, -1)
        for s in (1, -1)
    ]


def build_singlet_ensemble() -> Ensemble:
    """Uniform mixture of the eight rule-respecting two-compartment boxings,
    compartment 1 ranging over all attribute triples."""
    w = Fraction(1, 8)
    return Ensemble(tuple((SingletBoxing.from_first(t), w) for t in _all_triples()))


# The eight designed three-compartment boxings, as (dark signs, round signs)
# per compartment.  Each row satisfies the parity packing rule; the swiss sign
# is shared per box, positive for the first four rows and negative for the rest.
_GHZ_ROWS = (
    ((-1, -1, 1), (1, 1, -1)),
    ((-1, -1, 1), (-1, -1, 1)),
    ((-1, 1, -1), (1, -1, 1)),
    ((-1, 1, -1), (-1, 1, -1)),
    ((1, -1, -1), (-1, 1, 1)),
    ((1, -1, -1), (1, -1, -1)),
    ((1, 1, 1), (1, 1, 1)),
    ((1, 1, 1), (-1, -1, -1)),
)


def build_ghz_ensemble() -> Ensemble:
    """Uniform mixture of the eight designed three-compartment boxings."""
    w = Fraction(1, 8)
    entries = []
    for i, (dark, rnd) in enumerate(_GHZ_ROWS):
        swiss = 1 if i < 4 else -1
        entries.append((GhzBoxing(dark, rnd, swiss), w))
    return Ensemble(tuple(entries))


def correlation_prob(ens: Ensemble, prop1: str, prop2: str) -> Fraction:
    """Probability that compartment 1 has prop1 and compartment 2 has prop2."""
    _checked_property(prop1)
    _checked_property(prop2)
    total = Fraction(0)
    for boxing, weight in ens.entries:
        if boxing.compartment1.get(prop1) == 1 and boxing.compartment2.get(prop2) == 1:
            total += weight
    return total


def tilde_correlation_prob(ens: Ensemble, prop1: str, prop2: str) -> Fraction:
    """Probability that compartment 1 has prop1 but lacks prop2.

    Under the complementation packing rule this equals
    correlation_prob(ens, prop1, prop2); without the rule it need not.
    """
    _checked_property(prop1)
    _checked_property(prop2)
    total = Fraction(0)
    for boxing, weight in ens.entries:
        if boxing.compartment1.get(prop1) == 1 and boxing.compartment1.get(prop2) == -1:
            total += weight
    return total


# Region sign patterns (dark, round, swiss) of compartment-1 items.  Region 1
# is dark-only, 2 dark-and-round-only, 3 all three, 4 dark-and-swiss-only,
# then the mirrored non-dark regions, 8 being none-of-the-three.
_REGION_SIGNS = (
    (1, -1, -1),
    (1, 1, -1),
    (1, 1, 1),
    (1, -1, 1),
    (-1, 1, -1),
    (-1, 1, 1),
    (-1, -1, 1),
    (-1, -1, -1),
)


@dataclass(frozen=True)
class VennCounts:
    """Measures of the eight property-combination regions of compartment-1 items."""

    k1: Fraction
    k2: Fraction
    k3: Fraction
    k4: Fraction
    k5: Fraction
    k6: Fraction
    k7: Fraction
    k8: Fraction

    def __post_init__(self):
        if sum(self.as_tuple()) != 1:
            raise ValueError("region measures must sum to exactly 1")

    def as_tuple(self) -> tuple[Fraction, ...]:
        return (self.k1, self.k2, self.k3, self.k4, self.k5, self.k6, self.k7, self.k8)


def venn_counts(ens: Ensemble) -> VennCounts:
    """Region measures of compartment-1 items for a two-compartment ensemble."""
    totals = [Fraction(0)] * 8
    for boxing, weight in ens.entries:
        c1 = boxing.compartment1
        pattern = (c1.dark, c1.round, c1.swiss)
        totals[_REGION_SIGNS.index(pattern)] += weight
    return VennCounts(*totals)


@dataclass(frozen=True)
class CorrelationReport:
    """The three pairwise coincidence probabilities and the inequality verdict.

    satisfied means p_AB + p_BC >= p_AC, the constraint every rule-respecting
    mixture obeys.  Values are exact rationals when source is "exact" and
    floats when source is "sampled".
    """

    p_AB: Fraction | float
    p_BC: Fraction | float
    p_AC: Fraction | float
    bell_lhs: Fraction | float
    satisfied: bool
    source: str

    def __post_init__(self):
        if self.source not in ("exact", "sampled"):
            raise ValueError(f"source must be exact or sampled, got {self.source!r}")
        for name in ("p_AB", "p_BC", "p_AC"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} out of [0, 1]: {p}")

    @classmethod
    def from_probs(cls, p_ab, p_bc, p_ac, source: str) -> CorrelationReport:
        lhs = p_ab + p_bc
        return cls(p_ab, p_bc, p_ac, lhs, bool(lhs >= p_ac), source)


def bell_check(ens: Ensemble) -> CorrelationReport:
    """Exact pairwise coincidence probabilities (dark-round, round-swiss,
    dark-swiss) and whether the first two sum to at least the third."""
    return CorrelationReport.from_probs(
        correlation_prob(ens, "dark", "round"),
        correlation_prob(ens, "round", "swiss"),
        correlation_prob(ens, "dark", "swiss"),
        "exact",
    )


@dataclass(frozen=True)
class ParityReport:
    """Weighted distribution of one parity product over an ensemble; constant
    holds the common value when the product is the same for every boxing."""

    pattern: str
    constant: int | None
    distribution: tuple[tuple[int, Fraction], ...]


def parity_product(ens: Ensemble, pattern: str) -> ParityReport:
    """Distribution of a three-letter parity product over a GHZ-type ensemble."""
    weights = {1: Fraction(0), -1: Fraction(0)}
    for boxing, weight in ens.entries:
        weights[boxing.pattern_product(pattern)] += weight
    distribution = tuple((v, w) for v, w in weights.items() if w > 0)
    constant = distribution[0][0] if len(distribution) == 1 else None
    return ParityReport(pattern, constant, distribution)


@dataclass(frozen=True)
class SingletVertex:
    """One deterministic boxing with its 0/1 coincidence indicators."""

    triple: AttributeTriple
    i_AB: int
    i_BC: int
    i_AC: int

    @property
    def gap(self) -> int:
        return self.i_AB + self.i_BC - self.i_AC


@dataclass(frozen=True)
class SingletEnumeration:
    """Exhaustive inequality certificate over the eight deterministic boxings."""

    vertices: tuple[SingletVertex, ...]
    min_gap: int
    tight_vertices: tuple[AttributeTriple, ...]
    all_satisfied: bool
    uniform_report: CorrelationReport


def enumerate_singlet_lhv() -> SingletEnumeration:
    """Certify the inequality on every deterministic two-compartment boxing.

    Each vertex contributes 0/1 indicators for the three coincidences; any
    mixture's probabilities are weighted averages of these, so a nonnegative
    gap on all eight vertices settles the general case by linearity.
    """
    vertices = []
    for t in _all_triples():
        vertices.append(
            SingletVertex(
                triple=t,
                i_AB=int(t.dark == 1 and t.round == -1),
                i_BC=int(t.round == 1 and t.swiss == -1),
                i_AC=int(t.dark == 1 and t.swiss == -1),
            )
        )
    gaps = [v.gap for v in vertices]
    min_gap = min(gaps)
    return SingletEnumeration(
        vertices=tuple(vertices),
        min_gap=min_gap,
        tight_vertices=tuple(v.triple for v in vertices if v.gap == min_gap),
        all_satisfied=all(g >= 0 for g in gaps),
        uniform_report=bell_check(build_singlet_ensemble()),
    )


@dataclass(frozen=True)
class GhzAssignment:
    """One of the 64 candidate sign assignments, kept if it passes the rule."""

    dark: tuple[int, int, int]
    round: tuple[int, int, int]

    @property
    def xxx_product(self) -> int:
        return self.dark[0] * self.dark[1] * self.dark[2]


@dataclass(frozen=True)
class GhzEnumeration:
    """Brute-force certificate for the three-compartment parity rule."""

    total_assignments: int
    survivors: tuple[GhzAssignment, ...]
    all_xxx_positive: bool
    matches_designed_ensemble: bool


def enumerate_ghz_lhv() -> GhzEnumeration:
    """Filter all 64 (dark, round) sign assignments through the three mixed
    parity constraints and certify what remains: exactly eight survivors, every
    one with positive all-dark product, and the survivor set identical to the
    designed ensemble's boxings."""
    survivors = []
    total = 0
    for signs in itertools.product((1, -1), repeat=6):
        total += 1
        d, r = signs[:3], signs[3:]
        if (
            d[0] * r[1] * r[2] == 1
            and r[0] * d[1] * r[2] == 1
            and r[0] * r[1] * d[2] == 1
        ):
            survivors.append(GhzAssignment(d, r))
    designed = {(b.dark, b.round) for b, _ in build_ghz_ensemble().entries}
    survivor_set = {(a.dark, a.round) for a in survivors}
    return GhzEnumeration(
        total_assignments=total,
        survivors=tuple(survivors),
        all_xxx_positive=all(a.xxx_product == 1 for a in survivors),
        matches_designed_ensemble=survivor_set == designed,
    )


def _cumulative_weights(ens: Ensemble) -> np.ndarray:
    cum = np.cumsum([float(w) for _, w in ens.entries])
    cum[-1] = 1.0  # absorb float rounding so every draw lands on an entry
    return cum


def sample_indices(ens: Ensemble, rng: np.random.Generator, count: int) -> np.ndarray:
    """Entry indices for `count` independent draws, weight-proportional.

    Deterministic given the generator state; a zero-measure gap in the
    cumulative weights is never selected.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    cum = _cumulative_weights(ens)
    return np.searchsorted(cum, rng.random(count), side="right")


def sample(ens: Ensemble, rng: np.random.Generator):
    """Draw one boxing with probability equal to its weight."""
    return ens.entries[int(sample_indices(ens, rng, 1)[0])][0]


_KINDS = {"singlet": SingletBoxing, "unconstrained": UnconstrainedBoxing, "ghz": GhzBoxing}


def _triple_to_dict(t: AttributeTriple) -> dict:
    return {"dark": t.dark, "round": t.round, "swiss": t.swiss}


def _boxing_to_dict(boxing) -> dict:
    if isinstance(boxing, GhzBoxing):
        return {
            "dark": list(boxing.dark),
            "round": list(boxing.round),
            "swiss": boxing.swiss,
        }
    return {
        "compartment1": _triple_to_dict(boxing.compartment1),
        "compartment2": _triple_to_dict(boxing.compartment2),
    }


def ensemble_to_dict(ens: Ensemble) -> dict:
    """JSON-ready form: attribute signs plus weights as numerator/denominator."""
    kind = next(k for k, cls in _KINDS.items() if cls is ens.boxing_type)
    return {
        "kind": kind,
        "entries": [
            {
                "boxing": _boxing_to_dict(b),
                "weight": {"numerator": w.numerator, "denominator": w.denominator},
            }
            for b, w in ens.entries
        ],
    }


def ensemble_from_dict(doc: dict) -> Ensemble:
    """Inverse of ensemble_to_dict; all ensemble invariants are re-checked."""
    cls = _KINDS.get(doc.get("kind"))
    if cls is None:
        raise ValueError(f"unknown ensemble kind {doc.get('kind')!r}")
    entries = []
    for entry in doc["entries"]:
        box = entry["boxing"]
        if cls is GhzBoxing:
            boxing = GhzBoxing(tuple(box["dark"]), tuple(box["round"]), box["swiss"])
        else:
            boxing = cls(
                AttributeTriple(**box["compartment1"]),
                AttributeTriple(**box["compartment2"]),
            )
        weight = Fraction(entry["weight"]["numerator"], entry["weight"]["denominator"])
        entries.append((boxing, weight))
    return Ensemble(tuple(entries))
