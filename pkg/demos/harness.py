# %% [markdown]
# # The identification harness
#
# `compare_algorithms` feeds identical seeded data to several estimators and
# averages their learning curves over trials. The same runs are available
# from the shell as `asp compare --algs rls,nlms,lms`.

# %%
import io

from asp.sysid import ExperimentConfig, compare_algorithms, count_ops, write_comparison_csv

cfgs = [ExperimentConfig(alg, iters=300, trials=32) for alg in ("rls", "nlms", "lms")]
results = compare_algorithms(cfgs, shared_seed=0)
for name, curve in results:
    print(f"{name:5s} reaches parameter error 1e-3 at iteration {curve.first_below(1e-3)}")

# %% [markdown]
# Small steps settle lower but later; this is the misadjustment trade-off.

# %%
iters = 4000
pair = [ExperimentConfig("lms", mu=mu, m=iters, iters=iters, noise_std=0.05, trials=16, label=f"mu={mu}")
        for mu in (0.002, 0.05)]
for name, curve in compare_algorithms(pair, shared_seed=0):
    print(f"{name:10s} steady state {curve.parameter_error[-500:].mean():.2e}")

# %% [markdown]
# Per-step multiply-accumulate counts, measured from the instrumented filters.

# %%
for alg in ("lms", "nlms", "ap", "rls"):
    print(alg, [count_ops(alg, n) for n in (4, 8, 16, 32)])

# %%
buf = io.StringIO()
write_comparison_csv(results, buf)
print(buf.getvalue().splitlines()[:3])
