"""Per-state logic programs of observed transitions and impossible actions.

Each visited state owns a program made of choice rules

    1 {s4; s9} 1 :- a3, s2.

(executing a3 in s2 leads to exactly one of s4, s9) and integrity constraints

    :- a5, s2.

(a5 cannot be executed in s2).  Constraints of the form ``:- a5.`` hold in every
state.  Only this fragment is needed, so answer sets are enumerated directly:
every unconstrained action with a rule yields one model per head atom.
"""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .puzzle import canonical_key


class Atom(NamedTuple):
    kind: str  # "state" | "action"
    index: int
    label: str

    @property
    def name(self) -> str:
        return ("s" if self.kind == "state" else "a") + str(self.index)


class Registry:
    """Bijection between atoms and states/actions.

    States are numbered in discovery order, actions in enumeration order.
    """

    def __init__(self, actions=()):
        self.actions = list(actions)
        self.action_index = {a: i for i, a in enumerate(self.actions)}
        self.states: list = []
        self.state_labels: list = []
        self.state_index: dict = {}

    def state(self, s, label: str | None = None) -> int:
        i = self.state_index.get(s)
        if i is None:
            i = len(self.states)
            self.state_index[s] = i
            self.states.append(s)
            self.state_labels.append(label if label is not None else _label(s))
        return i

    def action(self, a) -> int:
        return self.action_index[a]

    def state_atom(self, i: int) -> Atom:
        return Atom("state", i, self.state_labels[i])

    def action_atom(self, i: int) -> Atom:
        return Atom("action", i, str(self.actions[i]))

    def to_tsv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(["kind", "index", "label"])
        for i, a in enumerate(self.actions):
            w.writerow(["action", i, str(a)])
        for i, label in enumerate(self.state_labels):
            w.writerow(["state", i, label])
        return buf.getvalue()


def _label(s) -> str:
    if isinstance(s, str):
        return s
    return canonical_key(s)


@dataclass
class StateProgram:
    state: int
    rules: dict = field(default_factory=dict)  # action index -> list of successor indices, insertion order
    constraints: set = field(default_factory=set)  # action indices

    def __eq__(self, other):
        if not isinstance(other, StateProgram):
            return NotImplemented
        return (
            self.state == other.state
            and {a: sorted(v) for a, v in self.rules.items()} == {a: sorted(v) for a, v in other.rules.items()}
            and self.constraints == other.constraints
        )


class ProgramError(ValueError):
    pass


class GlobalProgram:
    def __init__(self, actions=()):
        self.registry = Registry(actions)
        self.programs: dict = {}  # state index -> StateProgram
        self.global_constraints: set = set()

    # -- construction --------------------------------------------------

    def _program(self, si: int) -> StateProgram:
        prog = self.programs.get(si)
        if prog is None:
            prog = self.programs[si] = StateProgram(si)
        return prog

    def is_constrained(self, s, a) -> bool:
        ai = self.registry.action(a)
        if ai in self.global_constraints:
            return True
        si = self.registry.state_index.get(s)
        if si is None:
            return False
        prog = self.programs.get(si)
        return prog is not None and ai in prog.constraints

    def record_transition(self, s, a, s2) -> bool:
        """Add s2 to the head of the rule for (s, a); True if the rule changed."""
        if self.is_constrained(s, a):
            raise ProgramError(f"({_label(s)}, {a}) is under an integrity constraint")
        si = self.registry.state(s)
        ti = self.registry.state(s2)
        ai = self.registry.action(a)
        heads = self._program(si).rules.setdefault(ai, [])
        if ti in heads:
            return False
        heads.append(ti)
        return True

    def record_forbidden(self, s, a) -> None:
        """Forbid `a` in state `s`, or in every state when `s` is None."""
        ai = self.registry.action(a)
        if s is None:
            self.global_constraints.add(ai)
            for prog in self.programs.values():
                prog.rules.pop(ai, None)
            return
        prog = self._program(self.registry.state(s))
        prog.constraints.add(ai)
        prog.rules.pop(ai, None)

    # -- queries --------------------------------------------------------

    def admissible(self, s) -> list:
        """Actions not ruled out in `s`, in enumeration order."""
        banned = set(self.global_constraints)
        si = self.registry.state_index.get(s)
        if si is not None and si in self.programs:
            banned |= self.programs[si].constraints
        return [a for i, a in enumerate(self.registry.actions) if i not in banned]

    def answer_sets(self, s) -> list:
        si = self.registry.state_index.get(s)
        if si is None:
            raise ProgramError(f"state {_label(s)} is not registered")
        prog = self.programs.get(si)
        if prog is None:
            return []
        return [(self.registry.action_atom(a), self.registry.state_atom(t)) for a, t in self.answer_set_indices(si)]

    def answer_set_indices(self, si: int) -> list:
        prog = self.programs.get(si)
        if prog is None:
            return []
        return enumerate_models(prog, self.global_constraints)

    # -- text -------------------------------------------------------------

    def print_program(self, s) -> str:
        si = s if isinstance(s, int) else self.registry.state_index.get(s)
        if si is None or si >= len(self.registry.states):
            raise ProgramError(f"state {s!r} is not registered")
        prog = self.programs.get(si, StateProgram(si))
        return _comments(self.registry, prog) + print_rules(prog) + print_constraints(prog)

    def print_global(self) -> str:
        lines = [f"% a{a} = {self.registry.actions[a]}\n" for a in sorted(self.global_constraints)]
        return "".join(lines) + "".join(f":- a{a}.\n" for a in sorted(self.global_constraints))

    def save(self, directory: str) -> None:
        """Write the two files per state, the global constraints and atoms.tsv."""
        prog_dir = os.path.join(directory, "programs")
        os.makedirs(prog_dir, exist_ok=True)
        reg = self.registry
        for si in range(len(reg.states)):
            prog = self.programs.get(si, StateProgram(si))
            header = _comments(reg, prog)
            with open(os.path.join(prog_dir, f"s{si}.rules"), "w", newline="\n") as fh:
                fh.write(header + print_rules(prog))
            with open(os.path.join(prog_dir, f"s{si}.constraints"), "w", newline="\n") as fh:
                fh.write(header + print_constraints(prog))
        with open(os.path.join(prog_dir, "global.constraints"), "w", newline="\n") as fh:
            fh.write(self.print_global())
        with open(os.path.join(directory, "atoms.tsv"), "w", newline="\n") as fh:
            fh.write(reg.to_tsv())


def enumerate_models(prog: StateProgram, global_constraints=frozenset()) -> list:
    out = []
    for a in sorted(prog.rules):
        if a in prog.constraints or a in global_constraints:
            continue
        for t in sorted(prog.rules[a]):
            out.append((a, t))
    return out


def seed_q_rows(program: GlobalProgram, s, qtable) -> int:
    """Create zero-valued Q entries for every action in the answer sets of `s`."""
    si = program.registry.state_index.get(s)
    if si is None:
        raise ProgramError(f"state {_label(s)} is not registered")
    actions = program.registry.actions
    created = 0
    seen = set()
    for a, _ in program.answer_set_indices(si):
        if a in seen:
            continue
        seen.add(a)
        created += qtable.ensure(s, actions[a])
    return created


# --------------------------------------------------------------------------
# text format


def _comments(reg: Registry, prog: StateProgram) -> str:
    lines = [f"% s{prog.state} = {reg.state_labels[prog.state]}\n"]
    for a in sorted(set(prog.rules) | prog.constraints):
        lines.append(f"% a{a} = {reg.actions[a]}\n")
    for t in sorted({t for heads in prog.rules.values() for t in heads}):
        if t != prog.state:
            lines.append(f"% s{t} = {reg.state_labels[t]}\n")
    return "".join(lines)


def print_rules(prog: StateProgram) -> str:
    lines = []
    for a in sorted(prog.rules):
        heads = "; ".join(f"s{t}" for t in sorted(prog.rules[a]))
        lines.append(f"1 {{{heads}}} 1 :- a{a}, s{prog.state}.\n")
    return "".join(lines)


def print_constraints(prog: StateProgram) -> str:
    return "".join(f":- a{a}, s{prog.state}.\n" for a in sorted(prog.constraints))


_RULE = re.compile(r"1\s*\{\s*(s\d+(?:\s*;\s*s\d+)*)\s*\}\s*1\s*:-\s*a(\d+)\s*,\s*s(\d+)\s*\.\s*$")
_CONSTRAINT = re.compile(r":-\s*a(\d+)\s*,\s*s(\d+)\s*\.\s*$")
_HEADER = re.compile(r"%\s*s(\d+)\s*=")
_GLOBAL = re.compile(r":-\s*a(\d+)\s*\.\s*$")


def _fail(msg: str, lineno: int, col: int):
    raise ProgramError(f"{msg} at line {lineno}, column {col}")


def parse_program(text: str, registry: Registry | None = None) -> StateProgram:
    """Parse rule and constraint lines for a single state."""
    prog = None
    header_state = None

    def check(a: int, s: int, lineno: int, col: int):
        nonlocal prog
        if registry is not None:
            if a >= len(registry.actions):
                _fail(f"action atom a{a} outside the registry", lineno, col)
            if s >= len(registry.states):
                _fail(f"state atom s{s} outside the registry", lineno, col)
        if prog is None:
            prog = StateProgram(s)
        elif prog.state != s:
            _fail(f"rule body state s{s} differs from s{prog.state}", lineno, col)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        col = len(raw) - len(raw.lstrip()) + 1
        if not line:
            continue
        if line.startswith("%"):
            m = _HEADER.match(line)
            if m and header_state is None:
                header_state = int(m.group(1))
            continue
        m = _RULE.match(line)
        if m:
            a, s = int(m.group(2)), int(m.group(3))
            check(a, s, lineno, col)
            heads = [int(x.strip()[1:]) for x in m.group(1).split(";")]
            if registry is not None:
                for t in heads:
                    if t >= len(registry.states):
                        _fail(f"state atom s{t} outside the registry", lineno, col)
            if a in prog.rules:
                _fail(f"duplicate rule for a{a}", lineno, col)
            if len(set(heads)) != len(heads):
                _fail("duplicate atom in rule head", lineno, col)
            prog.rules[a] = heads
            continue
        m = _CONSTRAINT.match(line)
        if m:
            a, s = int(m.group(1)), int(m.group(2))
            check(a, s, lineno, col)
            prog.constraints.add(a)
            continue
        _fail(f"unrecognised statement {line!r}", lineno, col)
    if prog is None:
        if header_state is None:
            raise ProgramError("program has no statements or header to identify its state")
        prog = StateProgram(header_state)
    overlap = set(prog.rules) & prog.constraints
    if overlap:
        raise ProgramError(f"actions {sorted(overlap)} have both a rule and a constraint")
    return prog


def parse_global(text: str) -> set:
    out = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        m = _GLOBAL.match(line)
        if m is None:
            _fail(f"unrecognised statement {line!r}", lineno, len(raw) - len(raw.lstrip()) + 1)
        out.add(int(m.group(1)))
    return out
