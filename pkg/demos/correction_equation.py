# %% [markdown]
# # One correction, five gains
#
# Every streaming estimator in `asp` updates `x <- x + gain * residual`. Here
# LMS, NLMS, affine projection and RLS chew through the same seeded rows, and
# we watch how fast each one finds the unknown impulse response.

# %%
import numpy as np

from asp.filters import ProjectionWindow, ap_window_step, initial_state, lms_step, nlms_step, rls_step
from asp.sysid import make_system, synthesize_data

n, m = 5, 50
x_star = make_system(n, seed=0)
sys = synthesize_data(x_star, m, noise_std=0.01, seed=0)
print("unknown system:", np.round(x_star, 3))

# %% [markdown]
# Run each filter for four passes over the data, keeping the squared
# parameter error after every step.

# %%
steps = 4 * m
errors = {name: np.empty(steps) for name in ("lms", "nlms", "ap", "rls")}
states = {"lms": initial_state(n), "nlms": initial_state(n), "ap": initial_state(n),
          "rls": initial_state(n, delta=1e-6)}
window = ProjectionWindow(order=2)

for k in range(steps):
    a, b = sys.A[k % m], sys.b[k % m]
    states["lms"], _ = lms_step(states["lms"], a, b, mu=0.05)
    states["nlms"], _ = nlms_step(states["nlms"], a, b)
    states["ap"], window, _ = ap_window_step(states["ap"], window, a, b)
    states["rls"], _ = rls_step(states["rls"], a, b)
    for name, s in states.items():
        errors[name][k] = np.sum((s.estimate - x_star) ** 2)

# %%
for k in (1, 5, 10, 25, 50, 100, 200):
    print(f"k={k:4d}  " + "  ".join(f"{name}={errors[name][k - 1]:.2e}" for name in errors))

# %% [markdown]
# RLS is essentially done after `n` rows; the projection methods follow, and
# plain LMS lags. The price shows in the operation counters.

# %%
for name, s in states.items():
    print(f"{name:5s} total MACs after {steps} steps: {s.mac_count}")
