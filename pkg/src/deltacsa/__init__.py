"""Exact computations with differential modules and differential matrix algebras over Q(x)."""
from .errors import (
    DeltaCsaError,
    DivisionByZero,
    NonSplitDenominator,
    NotInClass,
    ParseError,
    SingularGauge,
    SingularMatrix,
    SizeLimit,
    UnsupportedClass,
)
from .ratfield import RatFunc, derive, parse, partial_fractions, render
from .hyperexp import HyperexpElem, TowerElem, parse_hyperexp, parse_tower
from .diffmod import DiffModule, FundamentalMatrix, direct_sum, dual, gauge_transform, tensor, verify_fundamental
from .hypersolve import (
    SplittingTower,
    rational_solution,
    solve_diagonal,
    solve_rank1,
    solve_triangular_2x2,
)
from .galois import GaloisDescriptor, classify, relation_lattice, tower_description
from .dcsa import (
    Dcsa,
    apply_derivation,
    associated_module,
    constants_algebra,
    find_split_matrix,
    split_check,
    tensor_power,
    triviality_check,
)
from .ideals import (
    IdealChain,
    RightIdeal,
    Subspace,
    conjugate,
    delta_stable_subspaces,
    flag_criterion,
    phi,
    phi_inverse,
    reductive_criterion,
)

__version__ = "0.1.0"
