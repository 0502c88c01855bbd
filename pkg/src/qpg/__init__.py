"""Numerical laboratory for quantum permutation groups and flat matrix models.

Subpackages by theme:

- :mod:`qpg.linalg` -- dense complex matrices, projectors, Gram matrices,
  Haar-random unitaries, the shared JSON matrix format.
- :mod:`qpg.permgroup` -- exact finite permutation group combinatorics:
  closure, orbits, derangements, transitivity levels and certificates,
  Latin-square tuples, deranging subgroups, ``PGL_2(p)``, character measures.
- :mod:`qpg.hadamard` -- complex Hadamard matrices, Fourier matrices, Dita
  deformations, magic bases and their multiplicative characterization, the
  ``Z_2^n`` Fourier transform pair.
- :mod:`qpg.weyl` -- clock-and-shift (generalized Pauli) bases, cocycle
  extraction, Weyl matrix models, closed-form moment matrices, character
  moments.
- :mod:`qpg.models` -- the flat-model engine: magic-unitary validation,
  flatness, moment matrices ``T_p``, stationarity, Cesaro averaging,
  character laws, orbits/orbitals, double transitivity, Latin-square /
  regular / classical / tensor models.
- :mod:`qpg.acceptance` -- the twelve-criterion acceptance battery.
- :mod:`qpg.cli` -- the ``qpg`` command-line frontend.
"""

from .linalg import (
    DEFAULT_TOL,
    gram,
    haar_unitaries,
    haar_unitary,
    is_projection,
    mc_tolerance,
    proj,
)
from .permgroup import (
    LatinSquare,
    PermGroup,
    Permutation,
    SpectralMeasure,
    character_measure,
    closure,
    cyclic_group,
    deranging_subgroups,
    derangements,
    enumerate_L_G,
    hyperoctahedral_segments,
    is_transitive,
    orbits,
    pgl2,
    regular_action,
    strongest_transitive_certificate,
    symmetric_group,
    transitivity_level,
)
from .hadamard import (
    HadamardMatrix,
    MagicBasis,
    dephase,
    dita_deform,
    fourier_matrix,
    magic_basis_is_hadamard_type,
    magic_from_hadamard,
    validate_hadamard,
    z2n_fourier_forward,
    z2n_fourier_inverse,
)
from .models import (
    FlatModel,
    MagicUnitary,
    MomentTensor,
    character_law,
    cesaro_moments,
    classical_model,
    direct_sum_model,
    double_transitivity_test,
    flatness,
    latin_square_model,
    model_flatness,
    orbit_relations,
    regular_model,
    stationarity_test,
    t_matrix,
    tensor_model,
    transitivity_estimate,
    universal_classical_model,
    validate_magic,
    validate_model,
)
from .weyl import (
    Cocycle,
    WeylBasis,
    extract_cocycle,
    t_matrix_closed_form,
    weyl_basis,
    weyl_character_moments,
    weyl_model,
)

__version__ = "0.1.0"
