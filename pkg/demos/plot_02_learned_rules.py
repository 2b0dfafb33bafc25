"""
What the online rule learner writes down
========================================

While an oASP agent explores, every transition it sees becomes a choice rule
and every failed move becomes a constraint.  After a few dozen episodes the
program already forbids the moves that can never work.
"""
# %%
#

import numpy as np

from tangle_rl.env import PuzzleEnv, make_config
from tangle_rl.learn import Agent, LearnerConfig
from tangle_rl.puzzle import build_spec

spec = build_spec("fishermans", "simplified")
env = PuzzleEnv(make_config(spec))
agent = Agent("oasp", spec, LearnerConfig(), rng=np.random.default_rng(1))

for ep in range(1, 41):
    m = agent.run_episode(env, ep)
print("last episode:", m)

# %%
#
# Global constraints: moves that failed because an object does not fit.

print(agent.program.print_global())

# %%
#
# The program for the start state, plus its answer sets.  Each answer set is
# one (action, successor) pair the agent has observed and may still take.

print(agent.program.print_program(spec.initial))
for action, successor in agent.program.answer_sets(spec.initial)[:6]:
    print(action.name, "->", successor.name)

# %%
#
# The agent only keeps Q-values for pairs the program allows.

print(len(agent.qtable), "state/action pairs,", len(agent.visited), "states acted from")
