"""Central numerical tolerances.

Every module takes its comparison thresholds from here so that the whole
package shares one convention: 1e-9 for projective/unitary comparisons,
1e-12 for identities that hold exactly in the algebra.
"""

# Projective equality of unitaries (global phase quotiented out).
COMPARE_ATOL = 1e-9

# Operator identities that are exact in the algebra (commutation relations,
# construction-path equality, symmetry commutators).
ALGEBRA_ATOL = 1e-12

# Flags on operator properties.
UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-12

# Relative (to spectral width) gap below which eigenvalues are grouped into
# one degenerate cluster.
DEGENERACY_RTOL = 1e-8

# Density-matrix positivity slack.
PSD_ATOL = 1e-9
