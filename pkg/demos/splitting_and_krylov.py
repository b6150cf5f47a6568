# %% [markdown]
# # Residues, splittings and Krylov vectors
#
# The error of a guess solves a system with the residue as right-hand side.
# Replacing the true inverse with an easy one gives Jacobi, Gauss-Seidel and
# SOR.

# %%
import numpy as np

from asp.iterative import SplittingKind, error_correct, iteration_matrix, krylov_basis, krylov_iterate, split_iterate
from asp.linalg import LinearSystem

rng = np.random.default_rng(3)
n = 10
A = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
b = rng.standard_normal(n)

for kind in (SplittingKind.jacobi(), SplittingKind.gauss_seidel(), SplittingKind.sor(1.5)):
    rho = np.max(np.abs(np.linalg.eigvals(iteration_matrix(A, kind))))
    x, trace = split_iterate(A, b, kind, tol=1e-10, max_iter=5000)
    print(f"{kind.variant:13s} rho={rho:.4f}  iterations={trace.iterations}")

# %% [markdown]
# One error-correction pass with an exact inner solve lands on the least
# squares answer from any guess.

# %%
M = rng.standard_normal((20, 4))
sys = LinearSystem(M, rng.standard_normal(20))
x = error_correct(sys, np.full(4, 100.0))
print("normal-equation residual:", np.linalg.norm(M.T @ (sys.b - M @ x)))

# %% [markdown]
# From `x0 = b`, the iteration `x <- (I - A) x + b` stays inside the Krylov
# space spanned by `b, Ab, A^2 b, ...`.

# %%
S = 0.2 * rng.standard_normal((6, 6))
c = rng.standard_normal(6)
K = krylov_basis(S, c, 4).matrix()
x3 = krylov_iterate(S, c, 3)
coef, *_ = np.linalg.lstsq(K, x3, rcond=None)
print("coefficients on [b, Ab, A^2b, A^3b]:", np.round(coef, 10))
