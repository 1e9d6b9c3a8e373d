"""The discrete p-Laplacian and its exact algebraic identities."""
import numpy as np

import graphflow as gf

z1 = gf.lattice_generator(1)
z2 = gf.lattice_generator(2)

# --- pointwise evaluation -------------------------------------------------
u = gf.delta_field(z1, (0,))  # unit point mass
print("point mass on Z^1, p = 3:")
print("  Delta_p u at the peak:", gf.apply_plaplacian(z1, u, 3, (0,)))
print("  Delta_p u one step away:", gf.apply_plaplacian(z1, u, 3, (1,)))

const = gf.Field(z1, {(k,): 5.0 for k in range(-3, 4)})
print("  constant field, interior vertex:", gf.apply_plaplacian(z1, const, 3, (0,)))

# --- Dirichlet energy (ordered pairs: each edge counted twice) ------------
region = gf.region_from_vertices(z1, [(0,)])
f = gf.Field(z1, {(0,): 1.0})
print("\nenergy of a point indicator =", gf.dirichlet_energy(z1, f, 3, region),
      "(= 2 d_w, the singleton Rayleigh-quotient numerator)")

# --- summation by parts: an exact identity, zero up to roundoff -----------
rng = np.random.default_rng(0)
ball = gf.ball(z2, (0, 0), 4)
worst = 0.0
for _ in range(50):
    vals = rng.standard_normal(len(ball))
    tvals = rng.standard_normal(len(ball))
    uu = gf.Field(z2, dict(zip(ball.vertices, map(float, vals))))
    ff = gf.Field(z2, dict(zip(ball.vertices, map(float, tvals))))
    worst = max(worst, gf.summation_by_parts_residual(z2, uu, ff, 3, relative=True))
print(f"\nsummation-by-parts relative residual over 50 random pairs: {worst:.2e}")

# --- the elementary power inequality behind the energy estimates ----------
print("\npower inequality gamma(q=1, p=3) =", gf.monotonicity_gamma(1, 3),
      "(equality case):", gf.monotonicity_check(2.0, 1.0, 1.0, 3.0))
hits = sum(gf.monotonicity_check(float(max(a, b)), float(min(a, b)), float(q), float(p))
           for a, b, q, p in zip(rng.uniform(0.1, 10, 500), rng.uniform(0.1, 10, 500) * 0.99,
                                 rng.uniform(0.1, 5, 500), rng.uniform(2.1, 6, 500))
           if a != b)
print("random sweep: all", hits, "sampled triples satisfy the bound")
