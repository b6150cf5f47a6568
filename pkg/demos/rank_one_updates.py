# %% [markdown]
# # Rank-1 inverse updates and the pseudoinverse
#
# RLS never inverts a matrix: each new row folds into the maintained inverse
# with the matrix inversion lemma. When the Gram matrix is singular we fall
# back on the eigen-pseudoinverse instead.

# %%
import numpy as np

from asp.filters import initial_state, reduced_rank_solve, rls_step
from asp.linalg import LinearSystem, pinv_psd, sherman_morrison_update, solve_normal_equations

rng = np.random.default_rng(1)
A = rng.standard_normal((40, 6))
delta = 1e-6

P = np.eye(6) / delta
for a in A:
    P = sherman_morrison_update(P, a)
direct = np.linalg.inv(delta * np.eye(6) + A.T @ A)
print("lemma chain vs direct inverse, max entry gap:", np.max(np.abs(P - direct)))

# %% [markdown]
# Driven by noiseless data, RLS lands on the least-squares answer; shrinking
# `delta` pulls it closer.

# %%
x_true = rng.uniform(-1, 1, 6)
sys = LinearSystem(A, A @ x_true)
x_ls = solve_normal_equations(sys)
for d in (1.0, 1e-3, 1e-6, 1e-10):
    s = initial_state(6, delta=d)
    for a, b in sys.rows():
        s, _ = rls_step(s, a, b)
    print(f"delta={d:g}: |x_rls - x_ls|_inf = {np.max(np.abs(s.estimate - x_ls)):.2e}")

# %% [markdown]
# Now make the columns dependent. The normal equations have no unique
# solution, and the pseudoinverse picks the one of minimum norm.

# %%
B = np.column_stack([A[:, :5], A[:, 0] + A[:, 1]])
sys_def = LinearSystem(B, B @ x_true)
try:
    solve_normal_equations(sys_def)
except ArithmeticError as err:
    print("direct solve refuses:", err)
x_rr = reduced_rank_solve(sys_def)
null = np.array([1.0, 1.0, 0, 0, 0, -1.0]) / np.sqrt(3)
print("residual:", np.linalg.norm(sys_def.b - B @ x_rr))
print("component along the null direction:", x_rr @ null)
G = sys_def.gram()
print("Penrose check |G G+ G - G|:", np.max(np.abs(G @ pinv_psd(G) @ G - G)))
