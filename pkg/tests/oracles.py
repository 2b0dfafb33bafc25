"""Independent oracles shared by the unit and acceptance suites."""

import itertools

import numpy as np

from tangle_rl.asp import StateProgram
from tangle_rl.puzzle import Moved, apply, enumerate_actions


def brute_force_models(prog: StateProgram, global_constraints) -> set:
    """Stable models of {choice rules, constraints} for one state, by checking every
    interpretation: one action fact is assumed, then every subset of head atoms is
    tested for constraint violation, cardinality and support."""
    models = set()
    actions = set(prog.rules) | set(prog.constraints) | set(global_constraints)
    for a in actions:
        true_bodies = [heads for act, heads in prog.rules.items() if act == a]
        atoms = sorted({t for heads in true_bodies for t in heads})
        for r in range(len(atoms) + 1):
            for chosen in itertools.combinations(atoms, r):
                chosen = set(chosen)
                if a in prog.constraints or a in global_constraints:
                    continue
                if any(len(chosen & set(h)) != 1 for h in true_bodies):
                    continue
                if not true_bodies:
                    continue
                supported = all(any(t in h for h in true_bodies) for t in chosen)
                if supported:
                    models |= {(a, t) for t in chosen}
    return models


def random_program(rng, n_actions=28, n_states=60):
    si = int(rng.integers(n_states))
    prog = StateProgram(si)
    for a in rng.choice(n_actions, size=int(rng.integers(0, n_actions + 1)), replace=False):
        k = int(rng.integers(1, 6))
        prog.rules[int(a)] = [int(t) for t in rng.choice(n_states, size=k, replace=False)]
    constrained = rng.choice(n_actions, size=int(rng.integers(0, 6)), replace=False)
    for a in constrained:
        prog.rules.pop(int(a), None)
        prog.constraints.add(int(a))
    glob = {int(a) for a in rng.choice(n_actions, size=int(rng.integers(0, 4)), replace=False)}
    return prog, glob


def random_walk_pairs(spec, n_moved, seed, walk_len=40):
    """(state, action, result) triples along random walks, until n_moved of them are moves."""
    rng = np.random.default_rng(seed)
    actions = enumerate_actions(spec)
    out = []
    s = spec.initial
    steps = moved = 0
    while moved < n_moved:
        a = actions[int(rng.integers(len(actions)))]
        r = apply(spec, s, a)
        out.append((s, a, r))
        if type(r) is Moved:
            s = r.next
            moved += 1
        steps += 1
        if steps % walk_len == 0:
            s = spec.initial
    return out
