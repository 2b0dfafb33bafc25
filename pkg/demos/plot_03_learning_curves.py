"""
Q-Learning against oASP on the simplified puzzle
================================================

A small multi-trial run of both learners.  The harness returns a
(trials, episodes, metrics) array and per-episode means and sds; the CSV files
land in ``runs/demo_*`` unless ``TANGLE_RL_OUT`` says otherwise.
"""
# %%
#

import os

import numpy as np

from tangle_rl.harness import ExperimentConfig, column, default_out, run_experiment, t_test

root = default_out()
results = {}
for alg in ("qlearning", "oasp"):
    cfg = ExperimentConfig(variant="simplified", algorithm=alg, trials=4, episodes=600, seed=0,
                           out=os.path.join(root, f"demo_{alg}"), save_artifacts=False)
    results[alg] = run_experiment(cfg)

# %%
#
# Mean steps per episode in blocks of 100 episodes.

for alg, res in results.items():
    steps = res.aggregate["steps"][0]
    print(f"{alg:10s}", np.round(steps.reshape(-1, 100).mean(axis=1), 1))

# %%
#
# The rule learner prunes pairs, so its table stays smaller while it visits
# at least as many states.

for alg, res in results.items():
    last = res.raw[:, -1, :]
    print(f"{alg:10s} visited {last[:, 2].mean():6.1f}  pairs {last[:, 3].mean():6.1f}")

# %%
#
# Welch's test per episode; print how many early episodes differ at 5%.

tt = t_test(column(results["qlearning"].raw, "steps"), column(results["oasp"].raw, "steps"))
print("episodes with p < 0.05 among the first 200:", int(np.sum(tt.p[:200] < 0.05)))

# %%
#
# Plot if matplotlib happens to be installed.

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for alg, res in results.items():
        plt.plot(res.aggregate["steps"][0], label=alg)
    plt.xlabel("episode")
    plt.ylabel("mean steps")
    plt.legend()
    plt.savefig(os.path.join(root, "demo_curves.png"))
