# %% [markdown]
# # Leray-Serre pages of affine torus bundles
#
# Two families of T^2-bundles. The first lives over T^2 with unipotent
# monodromy. The second lives over the antipodal mapping torus.

# %%
from torusdual.localsys import LocalSystem, MappingTorus, Torus
from torusdual.lsss import AffineBundle, apply_d2, e2_page, final_page, total_cohomology


def show(title, bundle):
    print(f"== {title}")
    e2 = e2_page(bundle)
    fin = final_page(bundle)
    for label, page in [("E2", e2), ("E3", apply_d2(bundle, e2)), ("Einf", fin)]:
        rows = [" ".join(f"{str(g):>8}" for g in row) for row in reversed(page.grid())]
        print(label, *rows, sep="\n  ")
    tc = total_cohomology(fin)
    print("H*(X) =", [str(g) for g in tc.assembled], "| chi =", tc.euler_characteristic())
    if fin.undetermined:
        print("undetermined higher differentials at", sorted(fin.undetermined))


unipotent = LocalSystem.from_matrices(Torus(2), [[[1, 2], [0, 1]], [[1, 3], [0, 1]]])
for j in (0, 4):
    show(f"T^2 base, j = {j}", AffineBundle.from_coordinates(unipotent, [j]))

antipodal = LocalSystem.from_matrices(MappingTorus.antipodal_sphere(2), [[[-1, -1], [0, -1]]])
for j in (0, 2, 3):
    show(f"antipodal base, j = {j}", AffineBundle.from_coordinates(antipodal, [j]))

# %% [markdown]
# For j = 0 on the antipodal base, d3 from E3^{0,2} to E3^{3,0} is not
# determined by the model, and the pipeline says so. For even j != 0 the
# source of that differential already vanishes on E3, so nothing is flagged.
