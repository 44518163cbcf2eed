"""Classical random Hamiltonians."""

from felab.classical.csp import ClauseModel, csp_law, fixed_clause_sample, perceptron_law
from felab.classical.distributions import (
    IncrementLaw,
    SpectralLaw,
    bernoulli_pm,
    discrete,
    empirical,
    gaussian,
    point_mass,
    point_spectrum,
    semicircle,
    two_atoms,
    uniform,
    uniform_spectrum,
)
from felab.classical.lattice import lattice_edges
from felab.classical.orthogonal import empirical_free_convolution, haar_orthogonal, orth_inv_sk_law
from felab.classical.pspin import (
    ea_pattern,
    general_variance_pspin_law,
    mixed_pspin_law,
    multispecies_law,
    two_replica_law,
)
from felab.classical.rfim import goe_law, ising_law, random_field_law, rfim_law, spiked_matrix_law
from felab.classical.trees import brw_law, grem_law, random_tree_automorphism
from felab.classical.xi import MixtureXi
