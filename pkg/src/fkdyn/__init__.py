"""Finite-horizon Feldman-Katok and Besicovitch pseudometrics.

Generators for classical symbolic and circle systems, the order-preserving
matching engine behind the edit-distance pseudometrics, finite-horizon
estimators, and sampling probes for loose-Kronecker / FK-sensitivity
classification experiments.
"""

__version__ = "0.1.0"

from .matching import (MatchResult, block_fit, geometric_fit,
                       max_fit_bruteforce, max_fit_dp)
from .probes import (PartitionWord, ProbeReport, ScanResult, fk_ball_sup,
                     katok_check, partition_word, sample_pairs,
                     sensitivity_scan, tlk_probe)
from .pseudometrics import (DeltaProfile, PseudometricEstimate, delta_grid,
                            delta_profile, doubling_schedule,
                            fbar_delta_estimate, fbar_n_delta, fbar_word,
                            lower_density, pointwise_distances,
                            rho_b_estimate, rho_b_prime_estimate,
                            rho_fk_estimate, upper_density)
from .systems import (GOLDEN, BernoulliSource, ExplicitSource, OrbitSource,
                      PeriodicSource, RotationSource, SturmianSource,
                      SubstitutionSource, Word, agreement_length,
                      bernoulli_word, chacon_source, circle_distance,
                      fibonacci_source, morse_source, orbit_word,
                      rotation_orbit, sturmian_word, substitution_word)
