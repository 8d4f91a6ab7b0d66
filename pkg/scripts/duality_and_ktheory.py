# %% [markdown]
# # T-duality moves and twisted K-theory
#
# On the unipotent T^2 family, a bundle with Chern class j and flux k dualizes
# to the pair (k, j). The flux class only depends on k mod j. Alternating the
# two moves runs the Euclidean algorithm.

# %%
from torusdual.ktheory import TwistPair, k_cell, normal_form, torus_family
from torusdual.tdual import FluxDatum, dualize

family = torus_family()
bundle = family.bundle(4)
pair = dualize(bundle, FluxDatum.from_coordinates(bundle, k=[6]))
print("dual Chern class:", pair.dual_bundle.chern.coordinates, "dual flux:", pair.dual_flux.k.coordinates)
print("relations:", pair.report.results)

# %%
start = TwistPair(4, 6)
nf, moves = normal_form(start)
print(f"{tuple(start)} reduces to {tuple(nf)} via", ", ".join(map(str, moves)))

# %% [markdown]
# The spectral sequence leaves the even K-group of (4, 6) as an extension
# problem: Z, Z^2 + Z/4 and Z can be glued in several ways. The orbit
# representative (0, 2) has no such ambiguity, and every cell in the orbit
# inherits its answer.

# %%
for p in [(4, 6), (2, 0), (0, 2), (3, 5), (0, 0)]:
    cell = k_cell(family, TwistPair(*p))
    pieces = [str(g) for _, g in cell.direct.pieces[0]]
    print(f"{p}: K0 = {cell.resolved[0]}, K1 = {cell.resolved[1]}; even pieces {pieces}")
