"""Satisfiability for dynamic logic over deterministic models.

Truth of every closure member is determined by the members that are
atoms or modalities over a single letter, through the one-step
unfolding equations of composite programs. The solver therefore works
with truth assignments to the closure and has two regimes.

The exact regime enumerates all assignments to the determining members,
then prunes: a survivor needs, per letter it demands, some surviving
assignment agreeing with it on every one-letter modality over that
letter, and every star eventuality must be dischargeable through such
matching edges. A witness is read off by walking demanded letters,
steering each step toward the oldest undischarged eventuality.

The lazy regime never enumerates. It runs a propositional search over
the unfolding equations, builds successor states only for demanded
letters, and memoizes states by their incoming demand. When a demand
is propositionally unsatisfiable, the responsible modal literals of
the parent are learned as a new clause, which is valid in every
deterministic model, and the search restarts.

Both regimes validate a found witness with the model checker before
reporting it. Resource caps turn into an unknown verdict, never into a
wrong one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import obsregex as ox
from ..errors import ResourceBudgetExceeded
from . import core as dc

__all__ = ["Sat", "Unsat", "Unknown", "dpdl_sat"]


@dataclass(frozen=True)
class Sat:
    model: object
    state: object


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str


class _Stuck(Exception):
    """Internal: the search cannot proceed; surfaces as Unknown."""


class _StepBudget(Exception):
    pass


def _is_frontier(g) -> bool:
    if isinstance(g, dc.Atom):
        return True
    return (isinstance(g, (dc.Dia, dc.Box))
            and isinstance(g.pi, ox.Atom))


def _definition(g):
    """How the truth of ``g`` is determined by other closure members.

    One of ("true",), ("false",), ("frontier",), ("not", h),
    ("eq", h), ("or", parts), ("and", parts). Every operand is itself
    a closure member whenever ``g`` is.
    """
    if isinstance(g, dc.Top):
        return ("true",)
    if isinstance(g, dc.Atom):
        return ("frontier",)
    if isinstance(g, dc.Not):
        return ("not", g.arg)
    if isinstance(g, dc.Or):
        return ("or", g.parts)
    if isinstance(g, dc.And):
        return ("and", g.parts)
    make = dc.dia if isinstance(g, dc.Dia) else dc.box
    junction = "or" if isinstance(g, dc.Dia) else "and"
    pi = g.pi
    if isinstance(pi, ox.Atom):
        return ("frontier",)
    if isinstance(pi, ox.Epsilon):
        return ("eq", g.arg)
    if isinstance(pi, ox.Empty):
        return ("false",) if isinstance(g, dc.Dia) else ("true",)
    if isinstance(pi, ox.Sum):
        return (junction, tuple(make(p, g.arg) for p in pi.parts))
    if isinstance(pi, ox.Concat):
        rest = ox.seq(*pi.parts[1:])
        return ("eq", make(pi.parts[0], make(rest, g.arg)))
    if isinstance(pi, ox.Star):
        return (junction, (g.arg, make(pi.body, g)))
    raise TypeError(f"unsupported program {pi!r}")


def _topo_order(members):
    """Members ordered so each one's determining operands come first."""
    order = []
    state = {}
    for root in members:
        stack = [root]
        while stack:
            g = stack[-1]
            st = state.get(g)
            if st == 2:
                stack.pop()
                continue
            if st == 1:
                state[g] = 2
                order.append(g)
                stack.pop()
                continue
            state[g] = 1
            d = _definition(g)
            if d[0] in ("not", "eq"):
                deps = (d[1],)
            elif d[0] in ("or", "and"):
                deps = d[1]
            else:
                deps = ()
            for h in deps:
                if state.get(h) is None:
                    stack.append(h)
    return order


class _Shape:
    """Letter-indexed view of the one-letter modalities of a closure."""

    def __init__(self, members):
        self.members = members
        self.dia = {}
        self.box = {}
        for g in members:
            if isinstance(g, (dc.Dia, dc.Box)) and isinstance(g.pi, ox.Atom):
                table = self.dia if isinstance(g, dc.Dia) else self.box
                table.setdefault(g.pi.symbol, []).append(g)
        self.letters = tuple(sorted(set(self.dia) | set(self.box)))
        self.profile = {a: tuple(self.dia.get(a, []) + self.box.get(a, []))
                        for a in self.letters}
        self.stars = [g for g in members
                      if isinstance(g, (dc.Dia, dc.Box))
                      and isinstance(g.pi, ox.Star)]

    def eventualities(self, truth):
        """Star modalities of ``truth`` that promise a discharge.

        ``truth`` answers membership queries. A true star diamond must
        reach its argument and a false star box must reach the
        argument's failure; everything else is a safety condition that
        edge matching enforces step by step.
        """
        out = []
        for g in self.stars:
            want = isinstance(g, dc.Dia)
            if (g in truth) == want:
                out.append((g.pi, g.arg, want))
        return out


_DFA_CACHE = {}


def _dfa_for(pi, letters):
    key = (pi, letters)
    d = _DFA_CACHE.get(key)
    if d is None:
        syms = sorted(set(letters) | ox.atoms(pi)) or ["a"]
        d = _DFA_CACHE[key] = ox.to_dfa(pi, ox.Alphabet(syms))
    return d


# --- exact regime -------------------------------------------------------------


class _Exact:
    def __init__(self, f, members, node_cap):
        self.f = f
        self.members = members
        self.node_cap = node_cap
        self.shape = _Shape(members)
        self.frontier = [g for g in members if _is_frontier(g)]
        order = [g for g in _topo_order(members) if not _is_frontier(g)]
        self.atoms = []
        for mask in range(2 ** len(self.frontier)):
            val = {g: bool(mask >> i & 1)
                   for i, g in enumerate(self.frontier)}
            for g in order:
                d = _definition(g)
                if d[0] == "true":
                    val[g] = True
                elif d[0] == "false":
                    val[g] = False
                elif d[0] == "not":
                    val[g] = not val[d[1]]
                elif d[0] == "eq":
                    val[g] = val[d[1]]
                elif d[0] == "or":
                    val[g] = any(val[h] for h in d[1])
                else:
                    val[g] = all(val[h] for h in d[1])
            self.atoms.append(frozenset(g for g in members if val[g]))
        self.alive = set(range(len(self.atoms)))
        self._groups = {}
        for a in self.shape.letters:
            groups = {}
            for j, atom in enumerate(self.atoms):
                args = tuple(g.arg in atom for g in self.shape.profile[a])
                groups.setdefault(args, []).append(j)
            self._groups[a] = groups

    def _required(self, i, a):
        atom = self.atoms[i]
        return tuple(g in atom for g in self.shape.profile[a])

    def _candidates(self, i, a):
        found = self._groups[a].get(self._required(i, a), ())
        return [j for j in found if j in self.alive]

    def _needs(self, i, a):
        atom = self.atoms[i]
        return (any(g in atom for g in self.shape.dia.get(a, ()))
                or any(g not in atom for g in self.shape.box.get(a, ())))

    def _discharged(self, i, expr, arg, want):
        return ox.nullable(expr) and (arg in self.atoms[i]) == want

    def _reach_discharge(self, i, pi, arg, want):
        dfa = _dfa_for(pi, self.shape.letters)
        seen = {(i, 0)}
        queue = [(i, 0)]
        while queue:
            j, q = queue.pop()
            if q in dfa.accepting and (arg in self.atoms[j]) == want:
                return True
            for a in self.shape.letters:
                if not self._needs(j, a):
                    continue
                q2 = dfa.transitions[(q, a)]
                for k in self._candidates(j, a):
                    nxt = (k, q2)
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
        return False

    def eliminate(self):
        changed = True
        while changed:
            changed = False
            for i in sorted(self.alive):
                ok = True
                for a in self.shape.letters:
                    if self._needs(i, a) and not self._candidates(i, a):
                        ok = False
                        break
                if ok:
                    for pi, arg, want in self.shape.eventualities(
                            self.atoms[i]):
                        if not self._reach_discharge(i, pi, arg, want):
                            ok = False
                            break
                if not ok:
                    self.alive.discard(i)
                    changed = True

    def roots(self):
        return [i for i in sorted(self.alive) if self.f in self.atoms[i]]

    # -- witness construction ---------------------------------------------

    def _next_step(self, i, expr, arg, want):
        """First (letter, atom) of a shortest discharging walk."""
        seen = {(i, expr)}
        layer = [(i, expr, None)]
        while layer:
            nxt = []
            for j, e, first in layer:
                for a in self.shape.letters:
                    if not self._needs(j, a):
                        continue
                    e2 = ox.derive(e, a)
                    if ox.is_empty_language(e2):
                        continue
                    for k in self._candidates(j, a):
                        step = first if first is not None else (a, k)
                        if self._discharged(k, e2, arg, want):
                            return step
                        if (k, e2) not in seen:
                            seen.add((k, e2))
                            nxt.append((k, e2, step))
            layer = nxt
        return None

    def extract(self):
        nodes = {}
        trans = {}
        atom_of = []
        agenda_of = []

        def make(i, carried):
            agenda = [entry for entry in carried
                      if not self._discharged(i, *entry)]
            spawned = sorted(self.shape.eventualities(self.atoms[i]),
                             key=lambda ob: dc.dpdl_key(ob[1]))
            for entry in spawned:
                if entry not in agenda and not self._discharged(i, *entry):
                    agenda.append(entry)
            key = (i, tuple(agenda))
            nid = nodes.get(key)
            if nid is None:
                if len(atom_of) >= self.node_cap:
                    raise ResourceBudgetExceeded(
                        f"witness walk exceeded {self.node_cap} nodes")
                nid = nodes[key] = len(atom_of)
                atom_of.append(i)
                agenda_of.append(tuple(agenda))
            return nid

        start = make(self.roots()[0], ())
        pending = [start]
        done = set()
        while pending:
            nid = pending.pop()
            if nid in done:
                continue
            done.add(nid)
            i = atom_of[nid]
            agenda = agenda_of[nid]
            plan = None
            if agenda:
                expr, arg, want = agenda[0]
                plan = self._next_step(i, expr, arg, want)
                if plan is None:
                    raise _Stuck(
                        "an eventuality became undischargeable during "
                        "witness construction")
            for a in self.shape.letters:
                if not self._needs(i, a):
                    continue
                if plan is not None and plan[0] == a:
                    j = plan[1]
                else:
                    j = self._candidates(i, a)[0]
                carried = []
                for expr, arg, want in agenda:
                    e2 = ox.derive(expr, a)
                    if not ox.is_empty_language(e2):
                        entry = (e2, arg, want)
                        if entry not in carried:
                            carried.append(entry)
                child = make(j, carried)
                trans[(nid, a)] = child
                if child not in done:
                    pending.append(child)
        val = {nid: frozenset(g.name for g in self.atoms[i]
                              if isinstance(g, dc.Atom))
               for nid, i in enumerate(atom_of)}
        model = dc.DpdlModel(tuple(range(len(atom_of))), trans, val,
                             alphabet=self.shape.letters)
        return model, start


# --- lazy regime ---------------------------------------------------------


class _Dpll:
    """Propositional search with assumptions and chronological flips.

    Clauses keep their two watched literals in positions 0 and 1.
    The solver is deterministic: decision order is fixed, default
    polarity is False unless a hint says otherwise.
    """

    def __init__(self, nvars, step_cap):
        self.nvars = nvars
        self.step_cap = step_cap
        self.clauses = []
        self.units = []
        self.watches = [[] for _ in range(2 * nvars)]
        self.empty = False

    @staticmethod
    def lit(var, positive):
        return 2 * var + (0 if positive else 1)

    def add_clause(self, lits):
        lits = sorted(set(lits))
        if any(l ^ 1 in set(lits) for l in lits):
            return
        if not lits:
            self.empty = True
        elif len(lits) == 1:
            self.units.append(lits[0])
        else:
            ci = len(self.clauses)
            self.clauses.append(lits)
            self.watches[lits[0]].append(ci)
            self.watches[lits[1]].append(ci)

    def _value(self, assign, lit):
        v = assign[lit >> 1]
        if v is None:
            return None
        return v == (lit & 1 == 0)

    def _propagate(self, assign, trail, queue):
        """Assign all consequences; True on success, False on conflict."""
        while queue:
            lit = queue.pop()
            fal = lit ^ 1
            watchlist = self.watches[fal]
            kept = []
            pos = 0
            while pos < len(watchlist):
                ci = watchlist[pos]
                pos += 1
                clause = self.clauses[ci]
                if clause[0] == fal:
                    clause[0], clause[1] = clause[1], clause[0]
                first = self._value(assign, clause[0])
                if first is True:
                    kept.append(ci)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self._value(assign, clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[clause[1]].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if first is False:
                    kept.extend(watchlist[pos:])
                    self.watches[fal] = kept
                    return False
                var = clause[0] >> 1
                assign[var] = (clause[0] & 1) == 0
                trail.append(var)
                queue.append(clause[0])
            self.watches[fal] = kept
        return True

    def solve(self, assumptions, polarity=None, order=None):
        """("sat", assign) or ("unsat", None). Raises on step budget."""
        if self.empty:
            return "unsat", None
        assign = [None] * self.nvars
        trail = []
        queue = []
        for lit in list(self.units) + list(assumptions):
            var, value = lit >> 1, (lit & 1) == 0
            if assign[var] is None:
                assign[var] = value
                trail.append(var)
                queue.append(lit)
            elif assign[var] != value:
                return "unsat", None
        if not self._propagate(assign, trail, queue):
            return "unsat", None
        if polarity is None:
            polarity = {}
        if order:
            chosen = set(order)
            decide = list(order) + [v for v in range(self.nvars)
                                    if v not in chosen]
        else:
            decide = list(range(self.nvars))
        stack = []
        pos = 0
        steps = 0
        while True:
            steps += 1
            if steps > self.step_cap:
                raise _StepBudget()
            while pos < len(decide) and assign[decide[pos]] is not None:
                pos += 1
            if pos >= len(decide):
                return "sat", assign
            var = decide[pos]
            value = polarity.get(var, False)
            stack.append((len(trail), var, value, False, pos))
            assign[var] = value
            trail.append(var)
            ok = self._propagate(assign, trail, [self.lit(var, value)])
            while not ok:
                while True:
                    if not stack:
                        return "unsat", None
                    mark, dvar, dval, flipped, dpos = stack.pop()
                    while len(trail) > mark:
                        assign[trail.pop()] = None
                    if not flipped:
                        break
                stack.append((mark, dvar, not dval, True, dpos))
                assign[dvar] = not dval
                trail.append(dvar)
                pos = dpos
                ok = self._propagate(assign, trail,
                                     [self.lit(dvar, not dval)])


class _Lazy:
    def __init__(self, f, members, node_cap, restart_cap, step_cap):
        self.f = f
        self.members = tuple(members)
        self.node_cap = node_cap
        self.restart_cap = restart_cap
        self.shape = _Shape(members)
        self.index = {g: i for i, g in enumerate(self.members)}
        self.dpll = _Dpll(len(self.members), step_cap)
        for g in self.members:
            self._emit(g)
        for a in self.shape.letters:
            boxes = {g.arg: g for g in self.shape.box.get(a, ())}
            for d in self.shape.dia.get(a, ()):
                b = boxes.get(d.arg)
                if b is not None:
                    self.dpll.add_clause([self._lit(d, False),
                                          self._lit(b, True)])
        self.polarity = {}
        self.retries = 0

    def _lit(self, g, positive):
        return _Dpll.lit(self.index[g], positive)

    def _emit(self, g):
        d = _definition(g)
        lit = self._lit
        if d[0] == "true":
            self.dpll.add_clause([lit(g, True)])
        elif d[0] == "false":
            self.dpll.add_clause([lit(g, False)])
        elif d[0] == "not":
            self.dpll.add_clause([lit(g, False), lit(d[1], False)])
            self.dpll.add_clause([lit(g, True), lit(d[1], True)])
        elif d[0] == "eq":
            self.dpll.add_clause([lit(g, False), lit(d[1], True)])
            self.dpll.add_clause([lit(g, True), lit(d[1], False)])
        elif d[0] == "or":
            self.dpll.add_clause([lit(g, False)]
                                 + [lit(h, True) for h in d[1]])
            for h in d[1]:
                self.dpll.add_clause([lit(g, True), lit(h, False)])
        elif d[0] == "and":
            self.dpll.add_clause([lit(g, True)]
                                 + [lit(h, False) for h in d[1]])
            for h in d[1]:
                self.dpll.add_clause([lit(g, False), lit(h, True)])

    def _solve(self, assumptions):
        order = sorted(self.polarity) if self.polarity else None
        return self.dpll.solve(assumptions, self.polarity, order)

    def _needs(self, assign, a):
        return (any(assign[self.index[g]]
                    for g in self.shape.dia.get(a, ()))
                or any(not assign[self.index[g]]
                       for g in self.shape.box.get(a, ())))

    def _demand(self, assign, a):
        """Signed successor requirements, or a conflicting member pair.

        Under an existing ``a``-successor, every one-letter modality
        over ``a`` pins its argument's truth there to its own truth
        here; the demand is that set of signed literals.
        """
        req = {}
        for g in self.shape.profile[a]:
            truth = assign[self.index[g]]
            var = self.index[g.arg]
            if var in req:
                if req[var][0] != truth:
                    return None, (req[var][1], g)
            else:
                req[var] = (truth, g)
        return req, None

    def _forcer(self, assign, a):
        for g in self.shape.dia.get(a, ()):
            if assign[self.index[g]]:
                return g
        for g in self.shape.box.get(a, ()):
            if not assign[self.index[g]]:
                return g
        raise AssertionError("demanded letter without an existence forcer")

    def _learn(self, assign, a, culprits):
        """Refute this combination of modal truths as a new validity.

        The culprits force contradictory facts at the successor, and
        one of them (or the added forcer) forces the successor to
        exist, so no state of any deterministic model satisfies all of
        them at once.
        """
        lits = []
        seen = set()
        for g in list(culprits) + [self._forcer(assign, a)]:
            if g not in seen:
                seen.add(g)
                lits.append(self._lit(g, not assign[self.index[g]]))
        before = len(self.dpll.clauses) + len(self.dpll.units)
        self.dpll.add_clause(lits)
        if len(self.dpll.clauses) + len(self.dpll.units) == before:
            raise _Stuck("a refuting lemma was already known; the "
                         "propositional search is not converging")

    def run(self):
        for _ in range(self.restart_cap):
            status, assign = self._solve([self._lit(self.f, True)])
            if status == "unsat":
                return Unsat()
            outcome = self._expand(assign)
            if outcome is not None:
                return outcome
        return Unknown("lemma restarts exhausted without convergence")

    def _expand(self, root_assign):
        """Build the demand graph; None means a lemma was learned."""
        nodes = {}
        assigns = []
        trans = {}
        pending = []

        def register(key, assign):
            if len(assigns) >= self.node_cap:
                raise ResourceBudgetExceeded(
                    f"demand graph exceeded {self.node_cap} states")
            nid = len(assigns)
            nodes[key] = nid
            assigns.append(assign)
            pending.append(nid)
            return nid

        register(("root",), root_assign)
        while pending:
            nid = pending.pop()
            assign = assigns[nid]
            for a in self.shape.letters:
                if not self._needs(assign, a):
                    continue
                req, conflict = self._demand(assign, a)
                if req is None:
                    self._learn(assign, a, conflict)
                    return None
                lits = sorted(_Dpll.lit(var, truth)
                              for var, (truth, _) in req.items())
                key = (a, tuple(lits))
                child = nodes.get(key)
                if child is None:
                    status, child_assign = self._solve(lits)
                    if status == "unsat":
                        core = self._minimize_core(lits)
                        culprits = [req[l >> 1][1] for l in core]
                        self._learn(assign, a, culprits)
                        return None
                    child = register(key, list(child_assign))
                trans[(nid, a)] = child
        return self._finish(assigns, trans)

    def _minimize_core(self, lits):
        kept = list(lits)
        for lit in list(lits):
            trial = [l for l in kept if l != lit]
            status, _ = self._solve(trial)
            if status == "unsat":
                kept = trial
        return kept

    def _finish(self, assigns, trans):
        missing = []
        for nid, assign in enumerate(assigns):
            view = _AssignView(self.index, assign)
            for pi, arg, want in self.shape.eventualities(view):
                if not self._walk_discharges(assigns, trans, nid,
                                             pi, arg, want):
                    missing.append((pi, arg, want))
        if missing:
            return self._retry(missing)
        val = {nid: frozenset(g.name for g in self.members
                              if isinstance(g, dc.Atom)
                              and assign[self.index[g]])
               for nid, assign in enumerate(assigns)}
        model = dc.DpdlModel(tuple(range(len(assigns))), trans, val,
                             alphabet=self.shape.letters)
        return Sat(model, 0)

    def _walk_discharges(self, assigns, trans, nid, pi, arg, want):
        dfa = _dfa_for(pi, self.shape.letters)
        argvar = self.index[arg]
        seen = {(nid, 0)}
        queue = [(nid, 0)]
        while queue:
            j, q = queue.pop()
            if q in dfa.accepting and assigns[j][argvar] == want:
                return True
            for a in self.shape.letters:
                child = trans.get((j, a))
                if child is None:
                    continue
                nxt = (child, dfa.transitions[(q, a)])
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def _unfold_frontier(self, g):
        """One-letter modalities whose truth defers ``g`` to a successor."""
        out = []
        seen = {g}
        stack = [g]
        while stack:
            d = _definition(stack.pop())
            if d[0] == "eq":
                parts = (d[1],)
            elif d[0] in ("or", "and"):
                parts = d[1]
            else:
                continue
            for h in parts:
                if h in seen or not isinstance(h, (dc.Dia, dc.Box)):
                    continue
                seen.add(h)
                if _is_frontier(h):
                    out.append(h)
                else:
                    stack.append(h)
        return out

    def _retry(self, missing):
        """Steer decisions toward discharging, then rebuild the graph.

        An undischarged obligation usually means the default branch
        deferred it forever: the one-letter unfolding kept renewing the
        promise at every successor while the argument never came true.
        The retry inverts the relevant defaults so each obligation is
        settled as early as the clauses allow, and deferral only happens
        when propagation forces it. Retrying stops once a failure adds
        no new steering, or after a fixed number of rounds.
        """
        hints = {}
        for pi, arg, want in missing:
            g = dc.dia(pi, arg) if want else dc.box(pi, arg)
            for h in self._unfold_frontier(g):
                hints[self.index[h]] = isinstance(h, dc.Box)
            hints[self.index[arg]] = want
        self.retries += 1
        if self.retries > 8 or all(self.polarity.get(v) == t
                                   for v, t in hints.items()):
            return Unknown("eventualities left undischarged after the "
                           "discharge-steering retries")
        self.polarity.update(hints)
        status, assign = self._solve([self._lit(self.f, True)])
        if status == "unsat":
            return Unsat()
        return self._expand(assign)


class _AssignView:
    """Adapter letting _Shape.eventualities query a DPLL assignment."""

    __slots__ = ("index", "assign")

    def __init__(self, index, assign):
        self.index = index
        self.assign = assign

    def __contains__(self, g):
        return self.assign[self.index[g]]


# --- entry point ----------------------------------------------------------


def dpdl_sat(f: dc.DpdlFormula, *, atom_cap: int = 2 ** 14,
             node_cap: int = 5000, restart_cap: int = 200,
             step_cap: int = 5_000_000):
    """Decide satisfiability of ``f`` over deterministic models.

    Returns ``Sat`` carrying a finite deterministic witness that the
    model checker has validated, ``Unsat``, or ``Unknown`` when a
    resource cap was hit. ``Unsat`` is only reported after exhaustive
    pruning (exact regime) or a propositional refutation from valid
    lemmas (lazy regime), so every definite verdict is sound.

    ``atom_cap`` bounds the assignment enumeration of the exact regime;
    formulas whose determining members would exceed it are handled
    lazily. The remaining caps bound witness size and search effort.
    """
    members = dc.closure(f)
    frontier_bits = sum(1 for g in members if _is_frontier(g))
    try:
        if 2 ** frontier_bits <= atom_cap:
            exact = _Exact(f, members, node_cap)
            exact.eliminate()
            if not exact.roots():
                return Unsat()
            model, state = exact.extract()
        else:
            outcome = _Lazy(f, members, node_cap, restart_cap,
                            step_cap).run()
            if not isinstance(outcome, Sat):
                return outcome
            model, state = outcome.model, outcome.state
    except ResourceBudgetExceeded as err:
        return Unknown(str(err))
    except _Stuck as err:
        return Unknown(str(err))
    except _StepBudget:
        return Unknown(f"propositional search exceeded {step_cap} steps")
    if not dc.dpdl_check(model, state, f):
        raise AssertionError("solver produced a witness the model checker "
                             "rejects; this is a bug")
    return Sat(model, state)
