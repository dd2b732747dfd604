"""Satisfiability for observation logic, via the bubble encoding.

``pol_sat`` translates the formula, runs the deterministic-model
solver, and reads a satisfying model back out of the witness: each
witness state decodes to a bubble whose slots carry closure labels,
the witness transitions become the observation transitions, and the
standard extraction turns that transition structure into a model whose
expected observations realize it. The final model is checked against
the source formula before it is reported.

A non-full label budget weakens only the negative side: the encoding
can run out of slots, so its unsatisfiability then means "no model
within this many labels", reported as unknown.

``pol_bounded_sat`` is the independent cross-check: exhaustive search
over small models with expressions drawn from a fixed pool.
"""

from __future__ import annotations

from itertools import product

from .. import bts
from .. import models as md
from .. import obsregex as ox
from .. import syntax as sx
from . import core as dc
from .solver import Sat, Unknown, Unsat, dpdl_sat
from .translate import LabelBudget, Translation

__all__ = ["pol_sat", "pol_bounded_sat", "decode_bts"]


def _reachable(model: dc.DpdlModel, start):
    """Witness states reachable from ``start``, in visit order."""
    order = [start]
    index = {start: 0}
    queue = [start]
    while queue:
        w = queue.pop(0)
        for a in model.alphabet:
            t = model.trans.get((w, a))
            if t is not None and t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
    return order, index


def _blocks(states, pairs):
    """Partition ``states`` into the classes generated by ``pairs``."""
    parent = {s: s for s in states}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in pairs:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx
    groups = {}
    for s in states:
        groups.setdefault(find(s), []).append(s)
    return tuple(tuple(sorted(g)) for g in
                 sorted(groups.values(), key=lambda g: sorted(g)[0]))


def decode_bts(t: Translation, model: dc.DpdlModel, state) -> bts.Bts:
    """Read the bubble transition structure out of a witness model."""
    order, index = _reachable(model, state)
    bubbles = []
    for w in order:
        v = model.val[w]
        slots = [ell for ell in t.labels
                 if t.surv(ell).name in v
                 and any(t.at_name(ell, psi) in v for psi in t.fl)]
        labels = {ell: frozenset(psi for psi in t.fl
                                 if t.at_name(ell, psi) in v)
                  for ell in slots}
        relations = {}
        for agent in t.agents:
            pairs = [(x, y) for x in slots for y in slots
                     if t.rel(agent, x, y).name in v]
            relations[agent] = _blocks(slots, pairs)
        bubbles.append(bts.Bubble(tuple(slots), labels, relations))
    delta = {}
    for (w, a), target in model.trans.items():
        if w in index and target in index:
            delta[(index[w], a)] = index[target]
    return bts.Bts(t.source, tuple(bubbles), delta, initial=index[state],
                   alphabet=t.alphabet)


def pol_sat(phi: sx.Formula, budget: LabelBudget | None = None, **caps):
    """Decide ``phi`` against the models of observation logic.

    A ``Sat`` verdict carries a checked model and state, and is sound
    at every budget. ``Unsat`` is only reported at the full budget;
    with fewer labels a failed search means the budget may simply be
    too small, which is reported as ``Unknown``. Solver resource caps
    are passed through in ``caps``.
    """
    t = Translation(phi, budget)
    outcome = dpdl_sat(t.formula, **caps)
    if isinstance(outcome, Unknown):
        return outcome
    if isinstance(outcome, Unsat):
        if t.budget.full:
            return Unsat()
        return Unknown(f"no model within {t.budget.labels} labels")
    structure = decode_bts(t, outcome.model, outcome.state)
    model, s0 = bts.extract_model(structure)
    if not model.check(s0, phi):
        raise AssertionError("decoded model fails the source formula; "
                             "this is a bug")
    return Sat(model, s0)


def _partitions(items):
    """All partitions of ``items``, each a tuple of sorted blocks."""
    items = list(items)
    if not items:
        return [()]
    head, rest = items[0], items[1:]
    out = []
    for sub in _partitions(rest):
        out.append(((head,),) + sub)
        for i, block in enumerate(sub):
            grown = tuple(sorted(block + (head,)))
            out.append(sub[:i] + (grown,) + sub[i + 1:])
    return out


def pol_bounded_sat(phi: sx.Formula, max_states: int = 2, pool=None):
    """Exhaustive search over models of at most ``max_states`` states.

    Expected observations are drawn from ``pool`` (default: just the
    empty word). Returns the first satisfying model and state in a
    fixed deterministic order, else ``Unknown``: the bound and pool
    are restrictions, so exhausting them proves nothing.
    """
    if pool is None:
        pool = (ox.epsilon(),)
    pool = tuple(pool)
    letters = set(sx.letters(phi))
    for e in pool:
        letters |= ox.atoms(e)
    alphabet = ox.Alphabet(sorted(letters) or ["a"])
    agents = sorted(sx.agents(phi))
    names = sorted(sx.props(phi))
    for k in range(1, max_states + 1):
        states = tuple(range(k))
        parts = _partitions(states)
        for exps in product(pool, repeat=k):
            exp = dict(zip(states, exps))
            for blocks in product(parts, repeat=len(agents)):
                relations = dict(zip(agents, blocks))
                for chosen in product(_prop_subsets(names), repeat=k):
                    props = dict(zip(states, chosen))
                    model = md.Model(alphabet, agents, states, props,
                                     exp, relations)
                    for s in states:
                        if model.check(s, phi):
                            return Sat(model, s)
    return Unknown(f"no model with at most {max_states} states over "
                   f"the given pool")


def _prop_subsets(names):
    out = []
    for mask in range(2 ** len(names)):
        out.append(frozenset(n for i, n in enumerate(names)
                             if mask >> i & 1))
    return out
