"""Quantumness of qubit channels from temporal correlations.

Subpackages:

- ``linalg``: dense Hermitian matrix kernel.
- ``conic``: small dense SDP/LP model and primal-dual solver.
- ``channels``: states, measurements, channels, Choi/PDO representations.
- ``correlations``: assemblages, two-time correlation tables, CHSH machinery.
- ``measures``: robustness measures, negativities, hierarchy classifier.
- ``tomosim``: simulated photon-counting tomography pipeline.
- ``cli``: command-line interface.
"""

__version__ = "0.1.0"
