"""hybridlattice models hybrid chains of flux qubits and NV-center ensembles.

It derives qubit-ensemble couplings from loop geometry, eliminates the qubits
dispersively to obtain coupled-boson Hamiltonians and analyses the resulting
bosonic lattice:
    magnetics - loop field, single-spin and collective couplings;
    hilbert - operator algebra, full hybrid Hamiltonian, eigensolver oracle;
    dispersive - generator, effective and RWA Hamiltonians, validation;
    lattice - Bogoliubov spectrum, ground energy, stability, tight binding.
"""

__name__ = 'hybridlattice'
__version__ = '0.3.0'
__author__ = 'Artem Kustov'
__author_email__ = 'kust.artcom@gmail.com'
__license__ = 'MIT'
