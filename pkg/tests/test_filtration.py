import random

import pytest

from polkit import obsregex as ox
from polkit import syntax as sx
from polkit.corpus import drone_model, random_formula, random_model, standard_pool
from polkit.filtration import Disagreement, filtrate, verify_filtration
from polkit.models import Model
from polkit.obsregex import Alphabet, parse_regex
from polkit.syntax import fl_closure, parse_formula


class TestConstruction:
    def test_duplicate_states_merge(self):
        m = Model(Alphabet(["a"]), ["i"], [0, 1, 2],
                  {0: {"p"}, 1: {"p"}, 2: set()},
                  {s: ox.star(ox.atom("a")) for s in (0, 1, 2)},
                  {"i": [{0, 1, 2}]})
        filt = filtrate(m, parse_formula("p"))
        assert filt.members == ((0, 1), (2,))
        assert filt.class_of[0] == filt.class_of[1] != filt.class_of[2]

    def test_drone_states_separate_when_formula_distinguishes(self):
        m = drone_model()
        filt = filtrate(m, parse_formula("K_d T1", m.alphabet))
        assert len(filt.members) == 2
        assert filt.model.exp[filt.class_of["u"]] is m.exp["u"]

    def test_valuation_restricted_to_formula_props(self):
        m = drone_model()
        filt = filtrate(m, parse_formula("K_d T1", m.alphabet))
        for c in filt.model.states:
            assert filt.model.props[c] <= {"T1"}

    def test_class_count_bounded(self):
        rng = random.Random(5)
        for _ in range(25):
            m = random_model(rng, agents=("i", "j"), max_states=5)
            f = random_formula(rng, agents=("i", "j"), depth=3)
            filt = filtrate(m, f)
            assert len(filt.members) <= 2 ** len(fl_closure(f))
            assert len(filt.members) <= len(m.states)

    def test_quotient_relation_is_partition(self):
        # edges of the quotient relation are closed into blocks even
        # when the witnessed pairs alone are not transitive
        m = Model(Alphabet(["a"]), ["i"], [0, 1, 2, 3],
                  {0: {"p", "q"}, 3: {"p"}},
                  {s: ox.star(ox.atom("a")) for s in range(4)},
                  {"i": [{0, 1}, {2, 3}]})
        f = parse_formula("p&q")
        filt = filtrate(m, f)
        assert len(filt.members) == 3
        assert filt.model.relation_blocks("i") == (frozenset({0, 1, 2}),)
        for c in filt.model.states:
            for g in fl_closure(f):
                assert filt.model.check(c, g) == \
                    m.check(filt.members[c][0], g)

    def test_rep_choice_validated(self):
        with pytest.raises(ValueError):
            filtrate(drone_model(), parse_formula("true"), "median")


class TestVerify:
    def test_trivial_formula_passes(self):
        assert verify_filtration(drone_model(), parse_formula("true")) is None

    def test_drone_diamond_passes(self):
        m = drone_model()
        f = parse_formula("<s*;p*;c>K_d T1", m.alphabet)
        assert verify_filtration(m, f, word_bound=3) is None

    def test_drone_box_passes(self):
        m = drone_model()
        f = parse_formula("[s*;p*]~(K_d T1|K_d ~T1)", m.alphabet)
        assert verify_filtration(m, f, word_bound=3) is None

    def test_representative_independence_on_drone(self):
        m = drone_model()
        for text in ("K_d T1", "<s*;p*;c>K_d T1", "[s*;p*]~K_d T1"):
            f = parse_formula(text, m.alphabet)
            fa = filtrate(m, f, "min")
            fb = filtrate(m, f, "max")
            for c in fa.model.states:
                for g in fl_closure(f):
                    assert fa.model.check(c, g) == fb.model.check(c, g)

    def test_known_disagreement_from_survival_divergence(self):
        # two states merge on closure truths but carry expectations with
        # different lifetimes; the quotient then loses a knowledge
        # witness that the base model keeps
        ab = Alphabet(["a", "b"])
        m = Model(ab, ["j"], [0, 1, 2],
                  {0: set(), 1: {"p", "q"}, 2: {"q"}},
                  {0: parse_regex("a+b", ab),
                   1: parse_regex("(a+b)*", ab),
                   2: parse_regex("(a+b)*", ab)},
                  {"j": [{0, 1, 2}]})
        f = parse_formula("K_j p", ab)
        filt = filtrate(m, f)
        assert filt.members == ((0, 2), (1,))
        d = verify_filtration(m, f, word_bound=2)
        assert isinstance(d, Disagreement)
        assert d.word == ("a", "a")
        assert d.state == 1
        assert d.formula is parse_formula("K_j p", ab)
        assert d.in_model is False and d.in_quotient is True
        assert "K_j p" in str(d)

    def test_sweep_has_known_failure_rate(self):
        # quotients by closure truth alone cannot track survival of
        # merged states; a small sweep is expected to catch some
        rng = random.Random(0)
        pool = standard_pool()
        outcomes = []
        for _ in range(60):
            m = random_model(rng, agents=("i", "j"), max_states=5,
                             pool=pool)
            f = random_formula(rng, agents=("i", "j"), depth=3)
            outcomes.append(verify_filtration(m, f, word_bound=3))
        assert any(d is None for d in outcomes)
        assert any(d is not None for d in outcomes)
