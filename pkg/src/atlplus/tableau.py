"""Tableau construction, realization analysis, and elimination.

The pretableau alternates two node kinds.  A *prestate* is a bare set of
state formulas awaiting saturation; applying the saturation rule turns it
into its full expansions, the *states*.  Applying the successor rule to a
state reads off its single-step quantified formulas and spins one move
vector per joint choice of the agents, each leading to a prestate that
collects the payloads the vector commits to.

Elimination first dissolves prestates (every move then leads to the
states of its target prestate) and then repeatedly removes states that
either lost all successors for some move vector or contain a quantified
path formula whose eventualities can no longer be realized.  The input is
satisfiable exactly when a state containing it survives.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .decomposition import (
    DEFAULT_CLOSURE_LIMIT,
    GammaComponent,
    closure,
    full_expansions,
    realized_now,
)
from .syntax import (
    TRUE,
    Enf,
    FormulaError,
    Next,
    StateFormula,
    Unav,
    enf,
    is_gamma,
    pnext,
    to_text,
)


@dataclass
class Prestate:
    index: int
    label: frozenset[StateFormula]
    states: list["TState"] = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"G{self.index}"

    def alive_states(self) -> list["TState"]:
        return [s for s in self.states if s.alive]

    def sorted_label(self) -> tuple[StateFormula, ...]:
        return tuple(sorted(self.label, key=lambda g: g.key))


@dataclass
class TState:
    index: int
    label: frozenset[StateFormula]
    linked: dict[StateFormula, GammaComponent]
    enf_steps: list[StateFormula] = field(default_factory=list)
    unav_steps: list[StateFormula] = field(default_factory=list)
    enf_positions: list[frozenset[int]] = field(default_factory=list)
    unav_positions: list[frozenset[int]] = field(default_factory=list)
    sigmas: list[tuple[int, ...]] = field(default_factory=list)
    moves: dict[tuple[int, ...], Prestate] = field(default_factory=dict)
    alive: bool = True

    @property
    def name(self) -> str:
        return f"D{self.index}"

    def sorted_label(self) -> tuple[StateFormula, ...]:
        return tuple(sorted(self.label, key=lambda g: g.key))

    def gamma_formulas(self) -> list[StateFormula]:
        return [g for g in self.sorted_label() if is_gamma(g)]

    def cells(self) -> list[tuple[Prestate, list[tuple[int, ...]]]]:
        """Move vectors grouped by target prestate, in first-vector order."""
        grouped: dict[int, tuple[Prestate, list[tuple[int, ...]]]] = {}
        for sigma in self.sigmas:
            pre = self.moves[sigma]
            if pre.index not in grouped:
                grouped[pre.index] = (pre, [])
            grouped[pre.index][1].append(sigma)
        return list(grouped.values())

    def move_vectors_for(self, step: StateFormula) -> list[tuple[int, ...]]:
        """The move vectors committed to the given successor formula."""
        m = len(self.enf_steps)
        if step in self.enf_steps:
            p = self.enf_steps.index(step)
            positions = self.enf_positions[p]
            return [s for s in self.sigmas if all(s[i] == p for i in positions)]
        if step in self.unav_steps:
            q = self.unav_steps.index(step)
            outside = frozenset(range(len(self.sigmas[0]))) - self.unav_positions[q]
            l = len(self.unav_steps)
            out = []
            for s in self.sigmas:
                responders = {i for i, v in enumerate(s) if v >= m}
                co = sum(s[i] - m for i in responders) % l
                if co == q and outside <= responders:
                    out.append(s)
            return out
        raise FormulaError(f"{step!r} is not a successor formula of {self.name}")


@dataclass
class Tableau:
    input: StateFormula
    universe: tuple[int, ...]
    prestates: list[Prestate] = field(default_factory=list)
    states: list[TState] = field(default_factory=list)
    phase: str = "pretableau"
    realization: dict[tuple[int, StateFormula], int] = field(default_factory=dict)
    elimination_trace: list[dict[str, list[int]]] = field(default_factory=list)
    _prestate_by_label: dict[frozenset[StateFormula], Prestate] = field(
        default_factory=dict
    )
    _state_by_label: dict[frozenset[StateFormula], TState] = field(
        default_factory=dict
    )

    @property
    def k(self) -> int:
        return len(self.universe)

    @property
    def initial_prestate(self) -> Prestate:
        return self.prestates[0]

    def alive_states(self) -> list[TState]:
        return [s for s in self.states if s.alive]

    def state_successors(self, state: TState, sigma: tuple[int, ...]) -> list[TState]:
        return state.moves[sigma].alive_states()

    def satisfying_states(self) -> list[TState]:
        return [s for s in self.alive_states() if self.input in s.label]


def _unconditional_step(universe: tuple[int, ...]) -> StateFormula:
    return enf(universe, pnext(TRUE))


def build_pretableau(f: StateFormula, universe: tuple[int, ...]) -> Tableau:
    """Alternate saturation and successor rules from ``{f}`` to a fixpoint."""
    tab = Tableau(input=f, universe=universe)
    pending: deque[Prestate] = deque()

    def get_prestate(label: frozenset[StateFormula]) -> Prestate:
        pre = tab._prestate_by_label.get(label)
        if pre is None:
            pre = Prestate(index=len(tab.prestates), label=label)
            tab.prestates.append(pre)
            tab._prestate_by_label[label] = pre
            pending.append(pre)
        return pre

    get_prestate(frozenset({f}))
    while pending:
        pre = pending.popleft()
        for expansion in full_expansions(pre.label):
            label = expansion.label
            if not any(_is_step(g) for g in label):
                label = label | {_unconditional_step(universe)}
            state = tab._state_by_label.get(label)
            if state is None:
                state = TState(
                    index=len(tab.states) + 1,
                    label=label,
                    linked=dict(expansion.linked),
                )
                tab.states.append(state)
                tab._state_by_label[label] = state
                _apply_next(tab, state, get_prestate)
            if state not in pre.states:
                pre.states.append(state)
    return tab


def _is_step(g: StateFormula) -> bool:
    return isinstance(g, (Enf, Unav)) and isinstance(g.path, Next)


def _apply_next(tab: Tableau, state: TState, get_prestate) -> None:
    """One move vector per joint agent choice; each commits some payloads."""
    universe = tab.universe
    k = len(universe)
    pos = {a: i for i, a in enumerate(universe)}
    state.enf_steps = sorted(
        (g for g in state.label if isinstance(g, Enf) and isinstance(g.path, Next)),
        key=lambda g: g.path.state.key,
    )
    state.unav_steps = sorted(
        (g for g in state.label if isinstance(g, Unav) and isinstance(g.path, Next)),
        key=lambda g: g.path.state.key,
    )
    state.enf_positions = [
        frozenset(pos[a] for a in g.coalition) for g in state.enf_steps
    ]
    state.unav_positions = [
        frozenset(pos[a] for a in g.coalition) for g in state.unav_steps
    ]
    m = len(state.enf_steps)
    l = len(state.unav_steps)
    all_positions = frozenset(range(k))
    for sigma in itertools.product(range(m + l), repeat=k):
        payloads: dict[StateFormula, None] = {}
        for p, g in enumerate(state.enf_steps):
            if all(sigma[i] == p for i in state.enf_positions[p]):
                payloads[g.path.state] = None
        if l:
            responders = {i for i in all_positions if sigma[i] >= m}
            co = sum(sigma[i] - m for i in responders) % l
            if all_positions - state.unav_positions[co] <= responders:
                payloads[state.unav_steps[co].path.state] = None
        target = frozenset(payloads) if payloads else frozenset({TRUE})
        pre = get_prestate(target)
        state.sigmas.append(sigma)
        state.moves[sigma] = pre


def eliminate_prestates(tab: Tableau) -> Tableau:
    """Dissolve prestates: every move now leads to the states of its target."""
    tab.phase = "initial"
    return tab


def realization_fixpoint(tab: Tableau) -> dict[tuple[int, StateFormula], int]:
    """Breadth-first ranks for (state, quantified-path-formula) pairs.

    Rank 0 pairs are discharged by the label alone.  A pair earns a finite
    rank when every move vector committed to its linked successor formula
    reaches, in every case, some surviving state where the re-quantified
    remainder has a strictly smaller rank.  Pairs that never earn a rank
    are unrealizable.
    """
    alive = tab.alive_states()
    pairs: list[tuple[TState, StateFormula]] = [
        (s, g) for s in alive for g in s.gamma_formulas()
    ]
    rank: dict[tuple[int, StateFormula], int] = {}
    for s, g in pairs:
        if realized_now(g.path, s.label):
            rank[(s.index, g)] = 0
    level = 0
    changed = True
    while changed:
        level += 1
        changed = False
        for s, g in pairs:
            if (s.index, g) in rank:
                continue
            component = s.linked[g]
            if component.step is None:
                continue  # dischargeable only locally, and the label said no
            ev1 = component.next_ev
            ok = True
            for sigma in s.move_vectors_for(component.step):
                targets = s.moves[sigma].alive_states()
                if not any(
                    rank.get((t.index, ev1), level) < level for t in targets
                ):
                    ok = False
                    break
            if ok:
                rank[(s.index, g)] = level
                changed = True
    return rank


def eliminate_states(tab: Tableau) -> list[dict[str, list[int]]]:
    """Alternate the two elimination rules in batched rounds to a fixpoint.

    Each round recomputes realization ranks on the current survivors, then
    removes every state with an unrealizable pair, then every state left
    with a dead move vector.  The trace records the removals per round.
    """
    trace: list[dict[str, list[int]]] = []
    while True:
        rank = realization_fixpoint(tab)
        tab.realization = rank
        removed_unrealized = [
            s
            for s in tab.alive_states()
            if any((s.index, g) not in rank for g in s.gamma_formulas())
        ]
        for s in removed_unrealized:
            s.alive = False
        removed_stuck = [
            s
            for s in tab.alive_states()
            if any(not tab.state_successors(s, sigma) for sigma in s.sigmas)
        ]
        for s in removed_stuck:
            s.alive = False
        if not removed_unrealized and not removed_stuck:
            break
        trace.append(
            {
                "unrealized": [s.index for s in removed_unrealized],
                "stuck": [s.index for s in removed_stuck],
            }
        )
    tab.phase = "final"
    tab.elimination_trace = trace
    return trace


@dataclass
class Decision:
    formula: StateFormula
    universe: tuple[int, ...]
    tableau: Tableau
    sat: bool
    pretableau_state_count: int
    pretableau_prestate_count: int
    final_state_count: int

    @property
    def eliminated_state_count(self) -> int:
        return self.pretableau_state_count - self.final_state_count


def decide(
    f: StateFormula,
    universe: tuple[int, ...],
    max_closure: int = DEFAULT_CLOSURE_LIMIT,
) -> Decision:
    """Run the full pipeline on a normal-form state formula."""
    closure(f, max_closure)
    tab = build_pretableau(f, universe)
    n_states = len(tab.states)
    n_prestates = len(tab.prestates)
    eliminate_prestates(tab)
    eliminate_states(tab)
    sat = bool(tab.satisfying_states())
    return Decision(
        formula=f,
        universe=universe,
        tableau=tab,
        sat=sat,
        pretableau_state_count=n_states,
        pretableau_prestate_count=n_prestates,
        final_state_count=len(tab.alive_states()),
    )


# ---------------------------------------------------------------------------
# DOT rendering


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _formula_lines(label: tuple[StateFormula, ...]) -> str:
    return "\\n".join(_dot_escape(to_text(g)) for g in label)


def _sigma_text(sigma: tuple[int, ...]) -> str:
    return ",".join(str(v) for v in sigma)


def tableau_dot(tab: Tableau, phase: str) -> str:
    """Graphviz rendering of one construction phase.

    ``pretableau`` shows dashed prestate boxes, solid state boxes, doubled
    saturation edges, and move-vector-labeled successor edges.  ``initial``
    dissolves the prestates; ``final`` keeps only the surviving states.
    """
    if phase not in ("pretableau", "initial", "final"):
        raise ValueError(f"unknown phase {phase!r}")
    lines = [f"digraph {phase} {{", "  rankdir=TB;", "  node [shape=box];"]
    if phase == "pretableau":
        for pre in tab.prestates:
            lines.append(
                f'  {pre.name} [style=dashed label="{pre.name}\\n'
                f'{_formula_lines(pre.sorted_label())}"];'
            )
        for state in tab.states:
            lines.append(
                f'  {state.name} [style=solid label="{state.name}\\n'
                f'{_formula_lines(state.sorted_label())}"];'
            )
        for pre in tab.prestates:
            for state in pre.states:
                lines.append(f'  {pre.name} -> {state.name} [color="black:black"];')
        for state in tab.states:
            for sigma in state.sigmas:
                lines.append(
                    f"  {state.name} -> {state.moves[sigma].name} "
                    f'[label="{_sigma_text(sigma)}"];'
                )
    else:
        keep = tab.states if phase == "initial" else tab.alive_states()
        kept = {s.index for s in keep}
        for state in keep:
            lines.append(
                f'  {state.name} [style=solid label="{state.name}\\n'
                f'{_formula_lines(state.sorted_label())}"];'
            )
        for state in keep:
            for sigma in state.sigmas:
                for target in state.moves[sigma].states:
                    if target.index in kept:
                        lines.append(
                            f"  {state.name} -> {target.name} "
                            f'[label="{_sigma_text(sigma)}"];'
                        )
    lines.append("}")
    return "\n".join(lines) + "\n"
