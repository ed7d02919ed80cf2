"""Exact-arithmetic checks for the classical boxed-attribute side.

Every probability here is a Fraction; equality assertions are exact, with no
floating-point tolerance anywhere except the sampling-frequency test."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from bellbox.lhv import (
    AttributeTriple,
    CorrelationReport,
    Ensemble,
    GhzBoxing,
    PARITY_PATTERNS,
    PROPERTIES,
    SingletBoxing,
    UnconstrainedBoxing,
    bell_check,
    build_ghz_ensemble,
    build_singlet_ensemble,
    correlation_prob,
    ensemble_from_dict,
    ensemble_to_dict,
    enumerate_ghz_lhv,
    enumerate_singlet_lhv,
    parity_product,
    sample,
    sample_indices,
    tilde_correlation_prob,
    venn_counts,
)

ALL_TRIPLES = [
    AttributeTriple(d, r, s) for d in (1, -1) for r in (1, -1) for s in (1, -1)
]


def random_singlet_ensemble(rng):
    counts = rng.integers(1, 50, size=8)
    total = int(counts.sum())
    return Ensemble(
        tuple(
            (SingletBoxing.from_first(t), Fraction(int(c), total))
            for t, c in zip(ALL_TRIPLES, counts)
        )
    )


class TestTypes:
    def test_attribute_triple_signs_enforced(self):
        with pytest.raises(ValueError):
            AttributeTriple(1, 0, 1)
        with pytest.raises(ValueError):
            AttributeTriple(True, 1, 1)

    def test_negated(self):
        t = AttributeTriple(1, -1, 1)
        assert t.negated() == AttributeTriple(-1, 1, -1)
        assert t.negated().negated() == t

    def test_get_rejects_unknown_property(self):
        with pytest.raises(ValueError):
            AttributeTriple(1, 1, 1).get("shiny")

    def test_singlet_boxing_rule_enforced(self):
        t = AttributeTriple(1, 1, -1)
        SingletBoxing(t, t.negated())
        with pytest.raises(ValueError):
            SingletBoxing(t, t)

    def test_unconstrained_boxing_accepts_anything(self):
        t = AttributeTriple(1, 1, -1)
        UnconstrainedBoxing(t, t)

    def test_ghz_boxing_rule_enforced(self):
        GhzBoxing((1, 1, 1), (1, 1, 1), 1)
        with pytest.raises(ValueError):
            GhzBoxing((-1, 1, 1), (1, 1, 1), 1)

    def test_ghz_pattern_product(self):
        box = GhzBoxing((-1, -1, 1), (1, 1, -1), 1)
        assert box.pattern_product("xyy") == 1
        assert box.pattern_product("xxx") == 1
        assert box.pattern_product("yyy") == -1
        with pytest.raises(ValueError):
            box.pattern_product("xz")

    def test_ensemble_validation(self):
        t = AttributeTriple(1, 1, 1)
        box = SingletBoxing.from_first(t)
        with pytest.raises(ValueError):
            Ensemble(())
        with pytest.raises(ValueError):
            Ensemble(((box, 0.5), (box, 0.5)))  # floats rejected
        with pytest.raises(ValueError):
            Ensemble(((box, Fraction(1, 2)),))  # does not sum to 1
        with pytest.raises(ValueError):
            Ensemble(((box, Fraction(3, 2)), (box, Fraction(-1, 2))))
        with pytest.raises(ValueError):
            Ensemble(
                (
                    (box, Fraction(1, 2)),
                    (GhzBoxing((1, 1, 1), (1, 1, 1), 1), Fraction(1, 2)),
                )
            )

    def test_from_counts_drops_zero_rows_and_normalizes(self):
        t0, t1 = ALL_TRIPLES[0], ALL_TRIPLES[1]
        ens = Ensemble.from_counts(
            [
                (SingletBoxing.from_first(t0), 3),
                (SingletBoxing.from_first(t1), 1),
                (SingletBoxing.from_first(ALL_TRIPLES[2]), 0),
            ]
        )
        assert len(ens.entries) == 2
        assert ens.entries[0][1] == Fraction(3, 4)


class TestDesignedEnsembles:
    def test_singlet_ensemble_shape(self):
        ens = build_singlet_ensemble()
        assert len(ens.entries) == 8
        assert all(w == Fraction(1, 8) for _, w in ens.entries)
        firsts = {b.compartment1 for b, _ in ens.entries}
        assert firsts == set(ALL_TRIPLES)

    def test_singlet_marginals_are_half(self):
        ens = build_singlet_ensemble()
        for prop in PROPERTIES:
            for compartment in ("compartment1", "compartment2"):
                mass = sum(
                    w
                    for b, w in ens.entries
                    if getattr(b, compartment).get(prop) == 1
                )
                assert mass == Fraction(1, 2)

    def test_ghz_ensemble_shape(self):
        ens = build_ghz_ensemble()
        assert len(ens.entries) == 8
        assert all(w == Fraction(1, 8) for _, w in ens.entries)
        assert len({(b.dark, b.round) for b, _ in ens.entries}) == 8
        swiss = [b.swiss for b, _ in ens.entries]
        assert swiss.count(1) == 4 and swiss.count(-1) == 4

    def test_ghz_marginals_are_half(self):
        ens = build_ghz_ensemble()
        for attr in ("dark", "round"):
            for site in range(3):
                mass = sum(w for b, w in ens.entries if getattr(b, attr)[site] == 1)
                assert mass == Fraction(1, 2)


class TestCorrelations:
    def test_known_pair_probabilities(self):
        ens = build_singlet_ensemble()
        assert correlation_prob(ens, "dark", "round") == Fraction(1, 4)
        assert correlation_prob(ens, "dark", "dark") == 0
        assert correlation_prob(ens, "swiss", "round") == Fraction(1, 4)

    def test_tilde_equals_plain_under_the_rule(self):
        rng = np.random.default_rng(5)
        ensembles = [build_singlet_ensemble()] + [
            random_singlet_ensemble(rng) for _ in range(200)
        ]
        for ens in ensembles:
            for p1, p2 in itertools.product(PROPERTIES, repeat=2):
                assert tilde_correlation_prob(ens, p1, p2) == correlation_prob(ens, p1, p2)

    def test_tilde_diverges_without_the_rule(self):
        # a box whose second compartment simply copies the first
        t = AttributeTriple(1, -1, 1)
        ens = Ensemble(((UnconstrainedBoxing(t, t), Fraction(1)),))
        assert tilde_correlation_prob(ens, "dark", "round") == 1
        assert correlation_prob(ens, "dark", "round") == 0

    def test_same_property_tilde_is_zero(self):
        ens = build_singlet_ensemble()
        assert tilde_correlation_prob(ens, "dark", "dark") == 0


class TestVennCounts:
    def test_uniform_ensemble_has_equal_regions(self):
        counts = venn_counts(build_singlet_ensemble())
        assert counts.as_tuple() == tuple([Fraction(1, 8)] * 8)

    def test_point_mass_lands_in_one_region(self):
        box = SingletBoxing.from_first(AttributeTriple(1, 1, 1))
        counts = venn_counts(Ensemble(((box, Fraction(1)),)))
        assert counts.k3 == 1
        assert sum(counts.as_tuple()) == 1
        assert counts.as_tuple().count(Fraction(0)) == 7

    def test_region_identities(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            ens = random_singlet_ensemble(rng)
            k = venn_counts(ens)
            assert tilde_correlation_prob(ens, "dark", "round") == k.k1 + k.k4
            assert tilde_correlation_prob(ens, "round", "swiss") == k.k2 + k.k5
            assert tilde_correlation_prob(ens, "dark", "swiss") == k.k1 + k.k2


class TestBellCheck:
    def test_designed_ensemble(self):
        report = bell_check(build_singlet_ensemble())
        assert (report.p_AB, report.p_BC, report.p_AC) == (
            Fraction(1, 4),
            Fraction(1, 4),
            Fraction(1, 4),
        )
        assert report.bell_lhs == Fraction(1, 2)
        assert report.satisfied
        assert report.source == "exact"

    def test_every_point_mass_satisfies(self):
        for t in ALL_TRIPLES:
            ens = Ensemble(((SingletBoxing.from_first(t), Fraction(1)),))
            assert bell_check(ens).satisfied

    def test_random_mixtures_satisfy_exactly(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            report = bell_check(random_singlet_ensemble(rng))
            assert report.satisfied
            assert report.bell_lhs >= report.p_AC

    def test_report_validation(self):
        with pytest.raises(ValueError):
            CorrelationReport.from_probs(Fraction(3, 2), Fraction(0), Fraction(0), "exact")
        with pytest.raises(ValueError):
            CorrelationReport.from_probs(Fraction(0), Fraction(0), Fraction(0), "guessed")


class TestParityProduct:
    def test_designed_ensemble_constants(self):
        ens = build_ghz_ensemble()
        for pattern in PARITY_PATTERNS:
            report = parity_product(ens, pattern)
            assert report.constant == 1
            assert report.distribution == ((1, Fraction(1)),)

    def test_point_mass_all_positive(self):
        ens = Ensemble(((GhzBoxing((1, 1, 1), (1, 1, 1), 1), Fraction(1)),))
        for pattern in PARITY_PATTERNS:
            assert parity_product(ens, pattern).constant == 1

    def test_mixture_with_both_values_has_no_constant(self):
        # yyy is unconstrained, so it can vary across the designed rows
        report = parity_product(build_ghz_ensemble(), "yyy")
        assert report.constant is None
        assert sum(w for _, w in report.distribution) == 1


class TestEnumeration:
    def test_singlet_certificate(self):
        cert = enumerate_singlet_lhv()
        assert len(cert.vertices) == 8
        assert cert.min_gap == 0
        assert cert.all_satisfied
        assert len(cert.tight_vertices) > 0
        assert cert.uniform_report.p_AB == Fraction(1, 4)

    def test_singlet_vertices_match_point_mass_probabilities(self):
        for vertex in enumerate_singlet_lhv().vertices:
            ens = Ensemble(((SingletBoxing.from_first(vertex.triple), Fraction(1)),))
            report = bell_check(ens)
            assert report.p_AB == vertex.i_AB
            assert report.p_BC == vertex.i_BC
            assert report.p_AC == vertex.i_AC

    def test_ghz_certificate(self):
        cert = enumerate_ghz_lhv()
        assert cert.total_assignments == 64
        assert len(cert.survivors) == 8
        assert cert.all_xxx_positive
        assert cert.matches_designed_ensemble
        assert len({(a.dark, a.round) for a in cert.survivors}) == 8

    def test_ghz_survivors_satisfy_constraints(self):
        for a in enumerate_ghz_lhv().survivors:
            d, r = a.dark, a.round
            assert d[0] * r[1] * r[2] == 1
            assert r[0] * d[1] * r[2] == 1
            assert r[0] * r[1] * d[2] == 1


class TestSampling:
    def test_point_mass_always_returns_it(self):
        box = SingletBoxing.from_first(AttributeTriple(1, -1, 1))
        ens = Ensemble(((box, Fraction(1)),))
        rng = np.random.default_rng(0)
        assert all(sample(ens, rng) is box for _ in range(50))

    def test_frequencies_near_uniform(self):
        ens = build_singlet_ensemble()
        rng = np.random.default_rng(42)
        n = 100_000
        idx = sample_indices(ens, rng, n)
        counts = np.bincount(idx, minlength=8)
        sigma = math.sqrt(n * (1 / 8) * (7 / 8))
        assert np.all(np.abs(counts - n / 8) < 4 * sigma)

    def test_determinism(self):
        ens = build_ghz_ensemble()
        a = sample_indices(ens, np.random.default_rng(123), 1000)
        b = sample_indices(ens, np.random.default_rng(123), 1000)
        assert np.array_equal(a, b)

    def test_count_validation(self):
        with pytest.raises(ValueError):
            sample_indices(build_singlet_ensemble(), np.random.default_rng(0), 0)


class TestSerialization:
    def test_round_trip_all_kinds(self):
        t = AttributeTriple(-1, 1, 1)
        cases = [
            build_singlet_ensemble(),
            build_ghz_ensemble(),
            Ensemble(
                (
                    (UnconstrainedBoxing(t, t), Fraction(2, 3)),
                    (UnconstrainedBoxing(t, t.negated()), Fraction(1, 3)),
                )
            ),
        ]
        for ens in cases:
            assert ensemble_from_dict(ensemble_to_dict(ens)) == ens

    def test_weights_serialized_as_integer_pairs(self):
        doc = ensemble_to_dict(build_singlet_ensemble())
        for entry in doc["entries"]:
            weight = entry["weight"]
            assert isinstance(weight["numerator"], int)
            assert isinstance(weight["denominator"], int)

    def test_bad_kind_rejected(self):
        with pytest.raises(ValueError):
            ensemble_from_dict({"kind": "other", "entries": []})

    def test_invariants_rechecked_on_load(self):
        doc = ensemble_to_dict(build_singlet_ensemble())
        doc["entries"][0]["weight"]["numerator"] = 7
        with pytest.raises(ValueError):
            ensemble_from_dict(doc)
