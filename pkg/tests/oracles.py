"""Slow reference implementations used only to cross-check the library.

Everything here is written against the same data types but with different
algorithms than the package uses, so agreement is meaningful.
"""

from __future__ import annotations

import itertools

from polkit.obsregex import Atom, Concat, Empty, Epsilon, ObsExpr, Star, Sum


def match_positions(e: ObsExpr, word: tuple, i: int, memo=None) -> frozenset:
    """All j with word[i:j] in L(e), by span decomposition (no derivatives)."""
    if memo is None:
        memo = {}
    key = (id(e), i)
    got = memo.get(key)
    if got is not None:
        return got
    if isinstance(e, Empty):
        out = frozenset()
    elif isinstance(e, Epsilon):
        out = frozenset({i})
    elif isinstance(e, Atom):
        out = frozenset({i + 1}) if i < len(word) and word[i] == e.symbol \
            else frozenset()
    elif isinstance(e, Sum):
        acc = set()
        for p in e.parts:
            acc |= match_positions(p, word, i, memo)
        out = frozenset(acc)
    elif isinstance(e, Concat):
        starts = {i}
        for p in e.parts:
            nxt = set()
            for s in starts:
                nxt |= match_positions(p, word, s, memo)
            starts = nxt
            if not starts:
                break
        out = frozenset(starts)
    elif isinstance(e, Star):
        closed = {i}
        frontier = {i}
        while frontier:
            new = set()
            for s in frontier:
                for j in match_positions(e.body, word, s, memo):
                    if j > s and j not in closed:
                        new.add(j)
            closed |= new
            frontier = new
        out = frozenset(closed)
    else:
        raise TypeError(f"not an ObsExpr: {e!r}")
    memo[key] = out
    return out


def member_oracle(e: ObsExpr, word) -> bool:
    word = tuple(word)
    return len(word) in match_positions(e, word, 0)


def words_up_to(symbols, max_len: int):
    """All words over ``symbols`` of length at most ``max_len``."""
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


def language_sample(e: ObsExpr, symbols, max_len: int) -> frozenset:
    """The finite slice of L(e) up to the given length, by the oracle."""
    return frozenset(w for w in words_up_to(symbols, max_len)
                     if member_oracle(e, w))
