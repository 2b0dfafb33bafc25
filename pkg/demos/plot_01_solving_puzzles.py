"""
Crossing chains and shortest plans
==================================

A puzzle state is a set of chains, one per long object.  Each chain lists the
holes that object passes through, in order from its tail, with the face it
enters by.  Here we build both puzzles, look at their start states and let
breadth-first search find a shortest plan.
"""
# %%
#

from tangle_rl.puzzle import (
    apply,
    bfs_solve,
    build_spec,
    enumerate_actions,
    hole_aliases,
    is_goal,
    parse_action,
    print_state,
)

ff = build_spec("fishermans", "original")
print(print_state(ff.initial, hole_aliases(ff)))
print(len(enumerate_actions(ff)), "actions")

# %%
#
# Actions are ``pass(object, hole, face)``.  Some never fit: a sphere is too
# big for the post hole, so the simulator refuses the move.

print(apply(ff, ff.initial, parse_action("pass(Sphere1,PostHole1,+)")))
moved = apply(ff, ff.initial, parse_action("pass(Sphere1,Ring,-)"))
print(print_state(moved.next))

# %%
#
# Shortest plans.  ``expanded`` counts the states BFS had to pop.

for puzzle, variant in [("fishermans", "simplified"), ("fishermans", "original"), ("ropeladder", "original")]:
    spec = build_spec(puzzle, variant)
    plan = bfs_solve(spec)
    print(f"{puzzle}/{variant}: {plan.length} moves, {plan.expanded} states expanded")

# %%
#
# Replaying the Fisherman's Folly plan by hand ends in a goal state.

sff = build_spec("fishermans", "simplified")
s = sff.initial
for a in bfs_solve(sff).actions:
    s = apply(sff, s, a).next
    print(f"{str(a):28s} {print_state(s)}")
print("goal reached:", is_goal(sff, s))
