"""Prime clusters in arithmetic progressions: sieves, characters, admissible tuples and scans."""

from ._backend import active as active_backend, available as available_backends, use_backend
from .arith import (
    INF,
    Factorization,
    crt_solve,
    egcd_solve,
    factorize,
    is_prime,
    mangoldt,
    mu,
    order_mod,
    phi,
)
from .characters import (
    DirichletCharacter,
    conductor,
    decompose,
    enumerate_characters,
    induce_primitive,
    psi_chi,
)
from .admissible import LinearSet, choose_tuple, is_admissible_criterion, omega_set
from .clusters import ClusterQuery, ClusterReport, calibrate_C, lower_bound, scan
from .errors import BudgetExceeded, DomainError, InsufficientTupleSpace, NoSolutionError
from .sieve import bv_error_sum, li, pi, pi_ap, primes_in, psi, psi_ap, theta

__version__ = "0.1.0"
