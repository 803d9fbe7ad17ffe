"""
The universal extension at p = 37
=================================

Build the metabelian model of Gal(H_37/Q), compute the universal extension
relative to complex conjugation and see the Taniyama elements move.
"""
from kspgal import galois_model
from kspgal.cm_types import CMType, flip_at_one
from kspgal.extensions import is_split_over_G, make_section, model_conjugation, taniyama_element, \
    universal_extension
from kspgal.groups import twist_module

m = galois_model(37)
print("|G| =", m.G.order, " A =", m.A.factors)

for j in (1, 31):
    u = universal_extension(m.G, m.H, twist_module(m.G, 37, j))
    print(f"j = {j:2d}  T^univ = {u.T}  split over G: {is_split_over_G(u) if u.T else True}")

# Complex conjugation never moves a CM class: w(-a) = c w(a) makes every
# Taniyama term trivial.  An element with a nonzero A-part does move the
# flipped type; the first type stays put because B_32 vanishes mod 37.
c = model_conjugation(m.G)
sd = m.G.structure
phi = CMType(37, tuple(range(1, 19)))
for w in (make_section(m.G), make_section(m.G, {a: [a % 5] for a in range(1, 19)})):
    print("c:", taniyama_element(m.G, c, phi, w))
    for t, u in ((0, 2), (1, 2), (3, 5)):
        sigma = sd.encode([t], sd.Q.labels.index(u))
        print(f"  ({t}, {u}):", taniyama_element(m.G, sigma, phi, w), taniyama_element(m.G, sigma, flip_at_one(phi), w))
