# %% [markdown]
# # The Hori transform on invariant forms
#
# Forms are exact multivectors on base generators f, fiber generators e and
# dual-fiber generators ê. The transform integrates exp(-B) ∧ ω over the
# fiber.

# %%
import random

from torusdual.hori import (
    GeneratorSet,
    Multivector,
    dual_hori_transform,
    hori_transform,
    mukai_pairing,
    random_form,
    random_model,
    twisted_differential,
)

gens = GeneratorSet(1, 2)
for mono in [(), (gens.e(1),), (gens.e(1), gens.e(2)), (gens.f(1), gens.e(2))]:
    x = Multivector.monomial(gens, *mono)
    print(f"T({x!r}) = {hori_transform(x)!r}")

# %% [markdown]
# Applying the transform twice returns the form up to a sign. The sign only
# depends on the fiber rank and the fiber degree.

# %%
x = Multivector.monomial(gens, gens.f(1), gens.e(1))
print("T̂T(f1 e1) =", dual_hori_transform(hori_transform(x)))

# %% [markdown]
# On a flat model with curvature, the transform intertwines the twisted
# differentials and scales the Mukai pairing by (-1)^{nm}.

# %%
rng = random.Random(1)
model = random_model(rng, 3, 2)
w = random_form(rng, model.gens)
lhs = hori_transform(twisted_differential(w, model))
rhs = twisted_differential(hori_transform(w), model, "dual")
print("chain map holds:", lhs == rhs)
a, b = random_form(rng, model.gens), random_form(rng, model.gens)
print("Mukai ratio:", mukai_pairing(hori_transform(a), hori_transform(b), "dual") / mukai_pairing(a, b) if mukai_pairing(a, b) else "pairing vanished")
