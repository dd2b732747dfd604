import pytest
from hypothesis import given, settings

from oracles import language_sample, member_oracle, words_up_to
from polkit import obsregex as ox
from polkit.errors import ParseError, StateBudgetExceeded, UnknownSymbol
from polkit.obsregex import (
    Alphabet, alt, atom, empty, epsilon, seq, star,
    derive, residuate, member, nullable, is_empty_language,
    language_equivalent, parse_regex, parse_word, print_regex, to_dfa,
)

from conftest import obs_expr_strategy

AB = Alphabet(["a", "b"])


def re(text):
    return parse_regex(text, AB)


class TestNormalization:
    def test_interning_gives_identity(self):
        assert re("a+b") is re("b+a")
        assert re("a;(b;a)") is re("(a;b);a")
        assert re("a+a") is re("a")

    def test_zero_laws(self):
        assert re("0;a") is empty()
        assert re("a;0") is empty()
        assert re("0+a") is re("a")
        assert re("0**") is epsilon()

    def test_unit_laws(self):
        assert re("0*;a") is re("a")
        assert re("a;0*") is re("a")
        assert seq() is epsilon()
        assert alt() is empty()

    def test_star_collapse(self):
        assert star(star(atom("a"))) is star(atom("a"))
        assert star(empty()) is epsilon()
        assert star(epsilon()) is epsilon()

    def test_sum_sorted_and_deduped(self):
        e = alt(atom("b"), atom("a"), atom("b"))
        assert print_regex(e) == "a+b"

    @given(obs_expr_strategy())
    def test_normalize_is_identity_on_factory_output(self, e):
        assert ox.normalize(e) is e


class TestPrintParse:
    @pytest.mark.parametrize("text,shown", [
        ("0", "0"),
        ("0*", "0*"),
        ("a", "a"),
        ("a;b", "a;b"),
        ("ab", "ab"),          # one two-letter symbol name
        ("a b", "a;b"),        # juxtaposition
        ("a+b;c", "a+b;c"),
        ("(a+b);c", "(a+b);c"),
        ("(a;b)*", "(a;b)*"),
        ("a**", "a*"),
        ("b*;a;a;(a+b)*", "b*;a;a;(a+b)*"),
    ])
    def test_round_trip(self, text, shown):
        e = parse_regex(text)
        assert print_regex(e) == shown
        assert parse_regex(print_regex(e)) is e

    @given(obs_expr_strategy())
    def test_print_then_parse_is_identity(self, e):
        assert parse_regex(print_regex(e)) is e

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as ei:
            parse_regex("a+\n+b")
        assert ei.value.line == 2
        assert ei.value.column == 1

    def test_unknown_symbol_rejected_with_alphabet(self):
        with pytest.raises(UnknownSymbol):
            parse_regex("a+c", AB)
        parse_regex("a+c")  # fine without one

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_regex("a)")


class TestDerivatives:
    def test_after_observing_b_then_a(self):
        e = re("b*;a;a;(a+b)*")
        assert residuate(e, ("b", "a")) is re("a;(a+b)*")

    def test_after_observing_a(self):
        assert derive(re("b*;a;b"), "a") is re("b")

    def test_derivative_of_star(self):
        assert derive(re("(a;b)*"), "a") is re("b;(a;b)*")

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbol):
            derive(re("a"), "c", AB)

    @given(obs_expr_strategy())
    @settings(max_examples=200)
    def test_member_agrees_with_span_oracle(self, e):
        for w in words_up_to(("a", "b"), 4):
            assert member(e, w) == member_oracle(e, w), print_regex(e)

    @given(obs_expr_strategy())
    @settings(max_examples=200)
    def test_residual_language_is_quotient(self, e):
        for w in words_up_to(("a", "b"), 2):
            r = residuate(e, w)
            got = language_sample(r, ("a", "b"), 2)
            want = frozenset(u for u in words_up_to(("a", "b"), 2)
                             if member_oracle(e, w + u))
            assert got == want

    @given(obs_expr_strategy(max_leaves=20))
    @settings(max_examples=100)
    def test_finitely_many_derivatives(self, e):
        # normalization keeps the derivative automaton small
        dfa = to_dfa(e, AB, max_states=4096)
        assert len(dfa.states) <= 4096


class TestEmptiness:
    def test_structural_emptiness(self):
        assert is_empty_language(empty())
        assert is_empty_language(re("0;a*"))
        assert not is_empty_language(epsilon())
        assert not is_empty_language(re("a*"))

    @given(obs_expr_strategy())
    def test_emptiness_matches_sampled_language(self, e):
        if not is_empty_language(e):
            # some word of length <= #dfa states is accepted
            dfa = to_dfa(e, AB, max_states=4096)
            n = len(dfa.states)
            assert any(member(e, w) for w in words_up_to(("a", "b"), min(n, 8)))
        else:
            assert not language_sample(e, ("a", "b"), 4)


class TestDfaAndEquivalence:
    def test_dfa_accepts_language(self):
        e = re("b*;a;a;(a+b)*")
        dfa = to_dfa(e, AB)
        for w in words_up_to(("a", "b"), 5):
            assert dfa.accepts(w) == member_oracle(e, w)

    def test_budget(self):
        with pytest.raises(StateBudgetExceeded):
            to_dfa(re("(a+b)*;a;(a+b);(a+b);(a+b)"), AB, max_states=3)

    @pytest.mark.parametrize("x,y,eq", [
        ("(a+b)*", "(a*;b*)*", True),
        ("a;a*", "a*;a", True),
        ("a;a*", "a*", False),
        ("0*", "a*", False),
        ("(a;b)*;a", "a;(b;a)*", True),
    ])
    def test_language_equivalent(self, x, y, eq):
        assert language_equivalent(re(x), re(y), AB) is eq

    @given(obs_expr_strategy(), obs_expr_strategy())
    @settings(max_examples=150)
    def test_equivalence_matches_bounded_sample(self, e1, e2):
        if language_equivalent(e1, e2, AB):
            assert language_sample(e1, ("a", "b"), 4) == \
                language_sample(e2, ("a", "b"), 4)

    def test_equivalence_without_alphabet_infers_symbols(self):
        assert language_equivalent(re("a+0"), re("a"))
        assert not language_equivalent(epsilon(), empty())


class TestWords:
    def test_tokens_and_char_splitting(self):
        assert parse_word("b a", AB) == ("b", "a")
        assert parse_word("ba", AB) == ("b", "a")
        assert parse_word("b,a", AB) == ("b", "a")
        assert parse_word("", AB) == ()

    def test_named_symbol_wins_over_splitting(self):
        alpha = Alphabet(["ab", "a", "b"])
        assert parse_word("ab", alpha) == ("ab",)

    def test_unknown(self):
        with pytest.raises(UnknownSymbol):
            parse_word("ac", AB)
