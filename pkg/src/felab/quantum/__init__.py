"""Dense Hermitian random operators: quantum SK, SYK and Clifford algebras."""

from felab.quantum.clifford import (
    JORDAN_WIGNER,
    LEFT_REGULAR,
    CliffordRep,
    SignedMonomial,
    clifford_generators,
    clifford_monomial,
    conjugation_sign,
    conjugation_sign_matrix,
    signed_monomial_group,
)
from felab.quantum.free_energy import (
    golden_thompson_gap,
    quantum_free_energy,
    quantum_log_z,
    quantum_subadditivity_report,
    sampled_symmetrizer_average,
    symmetrizer_average,
)
from felab.quantum.hamiltonians import (
    QSK_LOCAL,
    SYK_MONOMIALS,
    OperatorLaw,
    mixed_clifford_tensor_hamiltonian,
    mixed_clifford_tensor_hamiltonian_law,
    qsk_hamiltonian,
    qsk_law,
    sum_operator_laws,
    syk_hamiltonian,
    syk_law,
    zero_operator_law,
)
from felab.quantum.operators import (
    OperatorError,
    dump_operator,
    hermiticity_residual,
    load_operator,
    pauli_matrices,
    random_hermitian,
    site_operator,
)
