"""
Reusing a simplified-puzzle Q-table as a heuristic
==================================================

Train oASP on Simplified Fisherman's Folly, save its Q-table, then let HoASP
and HAQL use it on the original puzzle.  Both start close to the answer.
"""
# %%
#

import os

from tangle_rl.harness import ExperimentConfig, area_under_curve, column, default_out, run_experiment, t_test

root = default_out()
src = ExperimentConfig(variant="simplified", algorithm="oasp", trials=1, episodes=1500, seed=7,
                       out=os.path.join(root, "demo_source"))
run_experiment(src)
table = os.path.join(src.out, "trial0", "qtable.tsv")
print(open(table).readline().strip())

# %%
#
# Four learners on the original puzzle.

runs = {}
for alg in ("qlearning", "haql", "oasp", "hoasp"):
    cfg = ExperimentConfig(variant="original", algorithm=alg, trials=4, episodes=400, seed=1,
                           out=os.path.join(root, f"demo_off_{alg}"), save_artifacts=False,
                           heuristic_from=table if alg in ("haql", "hoasp") else None)
    runs[alg] = run_experiment(cfg)

auc = {alg: area_under_curve(column(r.raw, "steps")) for alg, r in runs.items()}
for alg, v in auc.items():
    print(f"{alg:10s} mean steps per episode {v.mean():7.1f}")

# %%
#
# One Welch test on the per-trial means.

for base, heur in (("qlearning", "haql"), ("oasp", "hoasp")):
    print(f"{heur} vs {base}: p = {t_test(auc[heur], auc[base]).p[0]:.3g}")
