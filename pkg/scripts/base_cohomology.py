# %% [markdown]
# # Twisted cohomology of a three-dimensional base
#
# The base is the mapping torus of the antipodal map on S^2. It is
# non-orientable and has fundamental group Z. A rank-2 local system is fixed
# by one monodromy matrix.

# %%
from sympy import Matrix, eye
from sympy.matrices.normalforms import invariant_factors

from torusdual.localsys import LocalSystem, MappingTorus, cohomology_groups

base = MappingTorus.antipodal_sphere(2)
rho = [[-1, -1], [0, -1]]
lam = LocalSystem.from_matrices(base, [rho]).validate()

for name, system in [("Z", LocalSystem.trivial(base)), ("Lambda", lam), ("Lambda*", lam.dual())]:
    print(f"H*(M, {name:8}) =", [str(g) for g in cohomology_groups(system)])

# %% [markdown]
# The Wang sequence gives the same answer by hand. The antipodal map acts by
# -1 on H^2(S^2), so degree 1 sees coker(rho - 1) and degree 3 sees
# coker(-rho - 1).

# %%
r = Matrix(rho)
print("coker(rho - 1)  invariant factors:", invariant_factors(r - eye(2)))
print("coker(-rho - 1) invariant factors:", invariant_factors(-r - eye(2)))
