"""Crossing-chain model of string-and-hole puzzles.

A state is a set of chains, one per long object.  Each chain lists, from tail
to head, the holes the object passes through, every crossing signed by the
face it exits.  Actions pass a crossing element through the hole of a host
element towards one face; they rewrite the chains as words over signed holes,
cancelling adjacent inverse crossings, so every move is undone by the same
move towards the opposite face.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence


class ObjectClass(enum.Enum):
    REGULAR = "Regular"
    HOLED = "Holed"
    LONG = "Long"


class HoleFace(enum.IntEnum):
    POSITIVE = 1
    NEGATIVE = -1

    @property
    def opposite(self) -> "HoleFace":
        return HoleFace(-self.value)

    @property
    def symbol(self) -> str:
        return "+" if self is HoleFace.POSITIVE else "-"

    @classmethod
    def from_symbol(cls, sym: str) -> "HoleFace":
        if sym == "+":
            return cls.POSITIVE
        if sym == "-":
            return cls.NEGATIVE
        raise ValueError(f"bad hole face {sym!r}")


POS = HoleFace.POSITIVE
NEG = HoleFace.NEGATIVE


class Crossing(NamedTuple):
    face: HoleFace
    hole: str

    def inverse(self) -> "Crossing":
        return Crossing(self.face.opposite, self.hole)


class ActionTriple(NamedTuple):
    ce: str
    he: str
    hf: HoleFace

    def inverse(self) -> "ActionTriple":
        return ActionTriple(self.ce, self.he, self.hf.opposite)

    def __str__(self) -> str:
        return f"pass({self.ce},{self.he},{self.hf.symbol})"


_ACTION_RE = re.compile(r"^\s*pass\(\s*(\w+)\s*,\s*(\w+)\s*,\s*([+-])\s*\)\s*$")


def parse_action(text: str) -> ActionTriple:
    m = _ACTION_RE.match(text)
    if m is None:
        raise ValueError(f"malformed action {text!r}")
    return ActionTriple(m.group(1), m.group(2), HoleFace.from_symbol(m.group(3)))


Chain = tuple  # tuple[Crossing, ...], tail -> head


@dataclass(frozen=True)
class PuzzleState:
    """Chains keyed by owner, kept sorted by owner name so equality is structural."""

    chains: tuple  # tuple[tuple[str, Chain], ...]

    @classmethod
    def from_dict(cls, chains: dict) -> "PuzzleState":
        return cls(tuple(sorted((k, tuple(v)) for k, v in chains.items())))

    def as_dict(self) -> dict:
        return {owner: chain for owner, chain in self.chains}

    def chain(self, owner: str) -> Chain:
        for k, v in self.chains:
            if k == owner:
                return v
        raise KeyError(owner)

    def owners(self) -> tuple:
        return tuple(k for k, _ in self.chains)


class Moved(NamedTuple):
    next: PuzzleState


class Impossible(NamedTuple):
    reason: str


# Reasons reported by apply(); NO_FIT is the only one that holds in every state.
NO_FIT = "does not fit"
WINDING = "winding limit exceeded"
TOO_LONG = "chain length limit exceeded"
OVER_CAP = "crossing count limit exceeded"
SELF_CROSSING = "self-crossing"
NO_RULE = "no rewrite rule applies"


@dataclass(frozen=True)
class PuzzleSpec:
    name: str
    variant: str
    objects: dict  # ObjectId -> ObjectClass, in declaration order
    attachments: dict  # Regular ObjectId -> (long ObjectId, "tail" | "head")
    hole_location: dict  # Holed ObjectId -> ("free",) | ("threaded", long) | ("head", long)
    crossing_elements: tuple
    host_elements: tuple
    no_fit: frozenset  # (ce, he) pairs that are physically too large
    forbidden_pairs: frozenset  # (ce, he) pairs removed from the action set
    initial: PuzzleState
    winding_limit: int = 2
    winding_overrides: dict = field(default_factory=dict)  # (owner, hole) -> limit
    goal_hole: str = "Ring"
    max_chain_length: int | None = None  # None = unbounded
    crossing_caps: dict = field(default_factory=dict)  # (owner, hole) -> max crossings in total

    def fits(self, ce: str, he: str) -> bool:
        return (ce, he) not in self.no_fit

    def limit_for(self, owner: str, hole: str) -> int:
        return self.winding_overrides.get((owner, hole), self.winding_limit)

    @property
    def long_objects(self) -> tuple:
        return tuple(o for o, c in self.objects.items() if c is ObjectClass.LONG)

    def head_hole(self, long_obj: str):
        for hole, loc in self.hole_location.items():
            if loc == ("head", long_obj):
                return hole
        return None

    def hole_owner(self, hole: str):
        """Long object carrying `hole` at its head, if any."""
        loc = self.hole_location.get(hole)
        if loc is not None and loc[0] == "head":
            return loc[1]
        return None

    def with_fits(self, changes: dict) -> "PuzzleSpec":
        """Copy with some fit entries replaced; `changes` maps (ce, he) -> bool."""
        no_fit = set(self.no_fit)
        for pair, ok in changes.items():
            if ok:
                no_fit.discard(pair)
            else:
                no_fit.add(pair)
        return _replace(self, no_fit=frozenset(no_fit))


def _replace(spec: PuzzleSpec, **kw) -> PuzzleSpec:
    import dataclasses

    return dataclasses.replace(spec, **kw)


# --------------------------------------------------------------------------
# puzzle catalogue

PUZZLES = ("fishermans", "ropeladder")
VARIANTS = {
    "fishermans": ("simplified", "original", "nondeterministic", "nonstationary-disk"),
    "ropeladder": ("simplified", "original", "nondeterministic"),
}


def _c(sym: str, hole: str) -> Crossing:
    return Crossing(HoleFace.from_symbol(sym), hole)


def _fishermans(variant: str, winding_limit: int, string_post_limit, max_chain_length, string_post_cap) -> PuzzleSpec:
    objects = {
        "String": ObjectClass.LONG,
        "Post": ObjectClass.LONG,
        "Base": ObjectClass.REGULAR,
        "Disk1": ObjectClass.REGULAR,
        "Disk2": ObjectClass.REGULAR,
        "Sphere1": ObjectClass.HOLED,
        "Sphere2": ObjectClass.HOLED,
        "Ring": ObjectClass.HOLED,
        "PostHole1": ObjectClass.HOLED,
    }
    no_fit = {
        ("Sphere1", "PostHole1"),
        ("Sphere2", "PostHole1"),
        ("Disk1", "Ring"),
        ("Disk2", "Ring"),
    }
    if variant == "nonstationary-disk":
        # before the switch the disks go through the Ring but not the Post hole
        no_fit -= {("Disk1", "Ring"), ("Disk2", "Ring")}
        no_fit |= {("Disk1", "PostHole1"), ("Disk2", "PostHole1")}
    overrides = {}
    if string_post_limit is not None:
        overrides[("String", "PostHole1")] = string_post_limit
    caps = {}
    if variant == "simplified" and string_post_cap is None:
        string_post_cap = 2
    if string_post_cap is not None:
        caps[("String", "PostHole1")] = string_post_cap
    initial = PuzzleState.from_dict(
        {
            "String": (_c("+", "Sphere1"), _c("+", "PostHole1"), _c("+", "Sphere2")),
            "Post": (_c("+", "Ring"),),
        }
    )
    return PuzzleSpec(
        name="fishermans",
        variant=variant,
        objects=objects,
        attachments={
            "Disk1": ("String", "tail"),
            "Disk2": ("String", "head"),
            "Base": ("Post", "tail"),
        },
        hole_location={
            "Sphere1": ("threaded", "String"),
            "Sphere2": ("threaded", "String"),
            "Ring": ("free",),
            "PostHole1": ("head", "Post"),
        },
        crossing_elements=("Sphere1", "Sphere2", "Post", "Disk1", "Disk2", "Ring"),
        host_elements=("PostHole1", "Ring"),
        no_fit=frozenset(no_fit),
        forbidden_pairs=frozenset(),
        initial=initial,
        winding_limit=winding_limit,
        winding_overrides=overrides,
        max_chain_length=max_chain_length,
        crossing_caps=caps,
    )


def _ropeladder(variant: str, winding_limit: int, string_post_limit, max_chain_length, string_post_cap) -> PuzzleSpec:
    objects = {
        "String": ObjectClass.LONG,
        "Post1": ObjectClass.LONG,
        "Post2": ObjectClass.LONG,
        "Disk1": ObjectClass.REGULAR,
        "Disk2": ObjectClass.REGULAR,
        "Sphere1": ObjectClass.HOLED,
        "Sphere2": ObjectClass.HOLED,
        "Ring": ObjectClass.HOLED,
        "PostHole1": ObjectClass.HOLED,
        "PostHole2": ObjectClass.HOLED,
    }
    no_fit = {
        ("Sphere1", "PostHole1"),
        ("Sphere1", "PostHole2"),
        ("Sphere2", "PostHole1"),
        ("Sphere2", "PostHole2"),
        ("Disk1", "Ring"),
        ("Disk2", "Ring"),
    }
    if variant == "simplified":
        string = ("+Sphere1", "+PostHole1", "+PostHole2", "+Sphere2")
    else:
        string = ("+Sphere1", "+PostHole1", "+PostHole1", "+PostHole2", "+PostHole2", "+Sphere2")
    limit = winding_limit if string_post_limit is None else string_post_limit
    initial = PuzzleState.from_dict(
        {
            "String": tuple(_c(s[0], s[1:]) for s in string),
            "Post1": (_c("+", "Ring"),),
            "Post2": (),
        }
    )
    return PuzzleSpec(
        name="ropeladder",
        variant=variant,
        objects=objects,
        attachments={"Disk1": ("String", "tail"), "Disk2": ("String", "head")},
        hole_location={
            "Sphere1": ("threaded", "String"),
            "Sphere2": ("threaded", "String"),
            "Ring": ("free",),
            "PostHole1": ("head", "Post1"),
            "PostHole2": ("head", "Post2"),
        },
        crossing_elements=("Sphere1", "Sphere2", "Post1", "Post2", "Disk1", "Disk2", "Ring"),
        host_elements=("PostHole1", "PostHole2", "Ring"),
        no_fit=frozenset(no_fit),
        forbidden_pairs=frozenset(
            {
                ("Disk1", "PostHole2"),
                ("Disk2", "PostHole1"),
                ("Post1", "PostHole2"),
                ("Post2", "PostHole1"),
            }
        ),
        initial=initial,
        winding_limit=winding_limit,
        winding_overrides={("String", "PostHole1"): limit, ("String", "PostHole2"): limit},
        max_chain_length=max_chain_length,
        crossing_caps={}
        if string_post_cap is None
        else {("String", "PostHole1"): string_post_cap, ("String", "PostHole2"): string_post_cap},
    )


DEFAULT_CHAIN_LENGTH = 9


def build_spec(
    puzzle: str,
    variant: str = "original",
    *,
    winding_limit: int = 2,
    string_post_limit: int | None = None,
    max_chain_length: int | None = DEFAULT_CHAIN_LENGTH,
    string_post_cap: int | None = None,
) -> PuzzleSpec:
    """Build the PuzzleSpec for a puzzle variant.

    `winding_limit` caps consecutive identical crossings for every hole/chain
    pair and `string_post_limit` overrides it for the String through the post
    hole(s).  `string_post_cap` bounds the total number of String crossings of
    each post hole (default 2 for the simplified Fisherman's Folly, unbounded
    otherwise).  `max_chain_length` bounds the number of crossings any chain may
    hold, standing in for the finite length of the string; None lifts it.
    """
    if puzzle not in VARIANTS:
        raise ValueError(f"unknown puzzle {puzzle!r}; expected one of {PUZZLES}")
    if variant not in VARIANTS[puzzle]:
        raise ValueError(f"unknown variant {variant!r} for {puzzle}; expected one of {VARIANTS[puzzle]}")
    if winding_limit < 1:
        raise ValueError("winding_limit must be positive")
    if string_post_cap is not None and string_post_cap < 1:
        raise ValueError("string_post_cap must be positive or None")
    if max_chain_length is not None and max_chain_length < 1:
        raise ValueError("max_chain_length must be positive or None")
    if puzzle == "fishermans":
        spec = _fishermans(variant, winding_limit, string_post_limit, max_chain_length, string_post_cap)
    else:
        spec = _ropeladder(variant, winding_limit, string_post_limit, max_chain_length, string_post_cap)
    validate_state(spec, spec.initial)
    return spec


# --------------------------------------------------------------------------
# actions and transitions


def enumerate_actions(spec: PuzzleSpec) -> list:
    actions = []
    for ce in spec.crossing_elements:
        for he in spec.host_elements:
            if ce == he or spec.hole_owner(he) == ce or (ce, he) in spec.forbidden_pairs:
                continue
            for hf in (POS, NEG):
                actions.append(ActionTriple(ce, he, hf))
    return actions


def _reduce(word: Iterable[Crossing]) -> Chain:
    out: list = []
    for c in word:
        if out and out[-1].hole == c.hole and out[-1].face == -c.face:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def _tip_drag(chain: Chain, end: str, hf: HoleFace, hole: str) -> Chain:
    if end == "head":
        if chain and chain[-1] == (-hf, hole):
            return chain[:-1]
        return chain + (Crossing(hf, hole),)
    if chain and chain[0] == (-hf, hole):
        return chain[1:]
    return (Crossing(hf, hole),) + chain


def _carry(chain: Chain, target: str, hf: HoleFace, hole: str) -> Chain:
    """Wrap every crossing of `target` in a loop through `hole`, then cancel."""
    if not any(c.hole == target for c in chain):
        return chain
    before = Crossing(hf, hole)
    after = Crossing(hf.opposite, hole)
    word: list = []
    for c in chain:
        if c.hole == target:
            word += (before, c, after)
        else:
            word.append(c)
    return _reduce(word)


def _violation(spec: PuzzleSpec, owner: str, chain: Chain):
    own = spec.head_hole(owner)
    run = 0
    prev = None
    for c in chain:
        if c.hole == own or c.hole == owner:
            return SELF_CROSSING
        run = run + 1 if c == prev else 1
        prev = c
        if run > spec.limit_for(owner, c.hole):
            return WINDING
    return _over_cap(spec.max_chain_length, _owner_caps(spec.crossing_caps, owner), chain)


def _owner_caps(caps: dict, owner: str) -> dict:
    return {h: n for (o, h), n in caps.items() if o == owner}


def _over_cap(max_len, caps: dict, chain: Chain):
    if max_len is not None and len(chain) > max_len:
        return TOO_LONG
    for hole, n in caps.items():
        if sum(1 for c in chain if c.hole == hole) > n:
            return OVER_CAP
    return None


class _Compiled:
    """Per-spec lookup tables so apply() avoids repeated scans of the spec."""

    def __init__(self, spec: PuzzleSpec):
        self.owners = tuple(sorted(spec.long_objects))
        self.index = {o: i for i, o in enumerate(self.owners)}
        self.head_hole = {o: spec.head_hole(o) for o in self.owners}
        holes = [h for h, c in spec.objects.items() if c is ObjectClass.HOLED]
        self.limits = {(o, h): spec.limit_for(o, h) for o in self.owners for h in holes}
        self.max_len = spec.max_chain_length
        self.caps = [_owner_caps(spec.crossing_caps, o) for o in self.owners]
        self.rule = {}
        for ce, kind in spec.objects.items():
            if ce in spec.attachments:
                owner, end = spec.attachments[ce]
                self.rule[ce] = ("drag", self.index[owner], end)
            elif kind is ObjectClass.LONG:
                self.rule[ce] = ("long", self.index[ce], spec.head_hole(ce))
            elif kind is ObjectClass.HOLED and spec.hole_owner(ce) is None:
                self.rule[ce] = ("carry", None, None)

    def violation(self, i: int, chain: Chain):
        owner = self.owners[i]
        own = self.head_hole[owner]
        limits = self.limits
        run = 0
        prev = None
        for c in chain:
            if c.hole == own:
                return SELF_CROSSING
            if c == prev:
                run += 1
                if run > limits[owner, c.hole]:
                    return WINDING
            else:
                run = 1
                prev = c
        return _over_cap(self.max_len, self.caps[i], chain)


_COMPILED: dict = {}


def _compiled(spec: PuzzleSpec) -> _Compiled:
    comp = _COMPILED.get(id(spec))
    if comp is None or comp[0] is not spec:
        comp = (spec, _Compiled(spec))
        _COMPILED[id(spec)] = comp
    return comp[1]


def apply(spec: PuzzleSpec, state: PuzzleState, action: ActionTriple):
    """Rewrite `state` by `action`; returns Moved(next) or Impossible(reason)."""
    ce, he, hf = action
    if (ce, he) in spec.no_fit:
        return Impossible(NO_FIT)
    comp = _compiled(spec)
    rule = comp.rule.get(ce)
    if rule is None:
        return Impossible(NO_RULE)
    if tuple(o for o, _ in state.chains) != comp.owners:
        raise ValueError("state does not belong to this puzzle")
    chains = [c for _, c in state.chains]
    kind, i, extra = rule
    changed = []
    if kind == "drag":
        chains[i] = _tip_drag(chains[i], extra, hf, he)
        changed.append(i)
    elif kind == "long":
        chains[i] = _tip_drag(chains[i], "head", hf, he)
        changed.append(i)
        if extra is not None:
            for j, chain in enumerate(chains):
                if j != i:
                    new = _carry(chain, extra, hf, he)
                    if new is not chain:
                        chains[j] = new
                        changed.append(j)
    else:
        for j, chain in enumerate(chains):
            new = _carry(chain, ce, hf, he)
            if new is not chain:
                chains[j] = new
                changed.append(j)
        if not changed:
            return Impossible(NO_RULE)
    for j in changed:
        bad = comp.violation(j, chains[j])
        if bad is not None:
            return Impossible(bad)
    return Moved(PuzzleState(tuple(zip(comp.owners, chains))))


def is_goal(spec: PuzzleSpec, state: PuzzleState) -> bool:
    return not any(c.hole == spec.goal_hole for _, chain in state.chains for c in chain)


def validate_state(spec: PuzzleSpec, state: PuzzleState) -> None:
    longs = set(spec.long_objects)
    owners = set(state.owners())
    if owners != longs:
        raise ValueError(f"state chains {sorted(owners)} do not match long objects {sorted(longs)}")
    for owner, chain in state.chains:
        for c in chain:
            if spec.objects.get(c.hole) is not ObjectClass.HOLED:
                raise ValueError(f"{c.hole} in chain({owner}) is not a holed object")
        bad = _violation(spec, owner, chain)
        if bad is not None:
            raise ValueError(f"chain({owner}) violates invariant: {bad}")


# --------------------------------------------------------------------------
# text notation


def _label(hole: str, aliases: dict | None) -> str:
    if aliases and hole in aliases:
        return aliases[hole]
    return hole


def hole_aliases(spec: PuzzleSpec) -> dict:
    """Head holes print under their post's name, as in `chain(String)=[+Post]`."""
    return {h: loc[1] for h, loc in spec.hole_location.items() if loc[0] == "head"}


# The printed key is the canonical form; no PuzzleSpec is needed to compute it, so
# head holes are spelled with their owner name via a fixed naming convention:
# PostHole<N> belongs to Post<N>, and a lone PostHole1 to Post when present.
def print_state(state: PuzzleState, aliases: dict | None = None) -> str:
    if aliases is None:
        aliases = _default_aliases(state)
    parts = []
    for owner, chain in state.chains:
        body = ",".join(c.face.symbol + _label(c.hole, aliases) for c in chain)
        parts.append(f"chain({owner})=[{body}]")
    return ";".join(parts)


def _default_aliases(state: PuzzleState) -> dict:
    owners = state.owners()
    if "Post" in owners:
        return {"PostHole1": "Post"}
    return {f"PostHole{o[4:]}": o for o in owners if o.startswith("Post") and o[4:].isdigit()}


def canonical_key(state: PuzzleState) -> str:
    return print_state(state)


class StateParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.column = col


_TOKEN = re.compile(r"\s*(chain|\(|\)|=|\[|\]|,|;|[+-]|\w+)")


def parse_state(text: str, spec: PuzzleSpec | None = None) -> PuzzleState:
    """Parse `chain(L)=[+H,...];...`.  With a spec, names are checked against it."""
    if spec is not None:
        valid_longs = set(spec.long_objects)
        resolve = {h: h for h, c in spec.objects.items() if c is ObjectClass.HOLED}
        resolve.update({alias: h for h, alias in hole_aliases(spec).items()})
    else:
        valid_longs = None
        resolve = None

    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def expect(lit: str):
        nonlocal pos
        skip_ws()
        if not text.startswith(lit, pos):
            raise StateParseError(f"expected {lit!r}", text, pos)
        pos += len(lit)

    def name() -> tuple:
        nonlocal pos
        skip_ws()
        m = re.compile(r"\w+").match(text, pos)
        if m is None:
            raise StateParseError("expected a name", text, pos)
        pos = m.end()
        return m.group(0), m.start()

    raw: dict = {}
    while True:
        expect("chain")
        expect("(")
        owner, at = name()
        if valid_longs is not None and owner not in valid_longs:
            raise StateParseError(f"unknown long object {owner!r}", text, at)
        if owner in raw:
            raise StateParseError(f"duplicate chain for {owner!r}", text, at)
        expect(")")
        expect("=")
        expect("[")
        crossings = []
        skip_ws()
        if pos < n and text[pos] == "]":
            pos += 1
        else:
            while True:
                skip_ws()
                if pos >= n or text[pos] not in "+-":
                    raise StateParseError("expected '+' or '-'", text, pos)
                face = HoleFace.from_symbol(text[pos])
                pos += 1
                hole, at = name()
                if resolve is not None:
                    if hole not in resolve:
                        raise StateParseError(f"unknown object {hole!r}", text, at)
                    hole = resolve[hole]
                crossings.append((face, hole, at))
                skip_ws()
                if pos < n and text[pos] == ",":
                    pos += 1
                    continue
                expect("]")
                break
        raw[owner] = crossings
        skip_ws()
        if pos >= n:
            break
        expect(";")
        skip_ws()
        if pos >= n:
            break

    if resolve is None:
        # No spec: undo the print aliases using the same convention.
        aliases = _default_aliases(PuzzleState(tuple((o, ()) for o in sorted(raw))))
        back = {alias: h for h, alias in aliases.items()}
        chains = {o: tuple(Crossing(f, back.get(h, h)) for f, h, _ in cs) for o, cs in raw.items()}
    else:
        chains = {o: tuple(Crossing(f, h) for f, h, _ in cs) for o, cs in raw.items()}
    state = PuzzleState.from_dict(chains)
    if spec is not None:
        validate_state(spec, state)
    return state


# --------------------------------------------------------------------------
# exact search


@dataclass
class Plan:
    actions: list
    expanded: int = 0

    @property
    def length(self) -> int:
        return len(self.actions)

    def to_text(self) -> str:
        return "".join(f"{a}\n" for a in self.actions)


class NotFound(Exception):
    def __init__(self, max_depth: int, expanded: int):
        super().__init__(f"no goal state within depth {max_depth} ({expanded} states expanded)")
        self.max_depth = max_depth
        self.expanded = expanded


def bfs_solve(spec: PuzzleSpec, max_depth: int = 20, start: PuzzleState | None = None) -> Plan:
    """Shortest plan to a goal; ties go to the earlier action in enumeration order."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    start = spec.initial if start is None else start
    actions = enumerate_actions(spec)
    parent = {start: None}
    frontier = [start]
    expanded = 0
    if is_goal(spec, start):
        return Plan([], 0)
    for _depth in range(max_depth):
        nxt = []
        for s in frontier:
            expanded += 1
            for a in actions:
                r = apply(spec, s, a)
                if type(r) is Impossible:
                    continue
                t = r.next
                if t in parent:
                    continue
                parent[t] = (s, a)
                if is_goal(spec, t):
                    return Plan(_unwind(parent, t), expanded)
                nxt.append(t)
        frontier = nxt
        if not frontier:
            break
    raise NotFound(max_depth, expanded)


def _unwind(parent: dict, t: PuzzleState) -> list:
    path = []
    while parent[t] is not None:
        t, a = parent[t]
        path.append(a)
    path.reverse()
    return path


def reachable(spec: PuzzleSpec, depth: int, start: PuzzleState | None = None) -> dict:
    """All states within `depth` moves, mapped to their BFS distance."""
    start = spec.initial if start is None else start
    actions = enumerate_actions(spec)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        d = dist[s]
        if d >= depth:
            continue
        for a in actions:
            r = apply(spec, s, a)
            if type(r) is Moved and r.next not in dist:
                dist[r.next] = d + 1
                queue.append(r.next)
    return dist


def replay(spec: PuzzleSpec, actions: Sequence[ActionTriple], start: PuzzleState | None = None):
    """Apply actions in order; returns the final state or None if any is impossible."""
    s = spec.initial if start is None else start
    for a in actions:
        r = apply(spec, s, a)
        if type(r) is Impossible:
            return None
        s = r.next
    return s
