"""Exact tools around symplectic K-theory of the integers: Bernoulli
numbers, cyclotomic CM lattices, finite-group homology and the universal
extensions it classifies, and the arithmetic tables built on them."""
from .exact_arith import bernoulli, zeta_neg, bernoulli_mod_p, numerator_prime_divisors
from .cyclotomic import CycElem, conjugate, trace_to_Q, different_generator, embedding_sign
from .cm_types import CMType, enumerate_cm_types, hodge_sum, flip_at_one, unit_cm_type, act_cyclotomic
from .cm_lattice import SkewHermitianForm, symplectic_gram, zeta_action_matrix, cm_type_of_form, standard_form
from .groups import FiniteGroup, GModule, cyclic_group, unit_group, semidirect_product, twist_module
from .group_homology import (
    BudgetExceeded,
    HomologyGroup,
    bar_homology,
    relative_bar_homology,
    reduce_cycle,
    hs_shortcut_h1,
    coinvariants,
)
from .extensions import (
    Extension,
    universal_extension,
    canonical_morphism,
    is_split_over_G,
    make_section,
    taniyama_reduce,
)
from .invariants import (
    irregular_pairs,
    ksp_structure,
    h_minus,
    galois_model,
    CMClass,
    cm_class_hodge,
    cm_class_betti,
    galois_act_cm,
    chern_divisibility,
)

__version__ = "0.1.0"
