"""Verification of univariate and multivariate stochastic orders.

The package decides convex-type orders between laws whose means may be
infinite or undefined.  It builds extremal couplings of given marginals,
compares lattice laws in the supermodular order, and bounds optimal
transport problems with supermodular costs.
"""

from .couplings import (CtExistence, CtNotExists, DiscreteJoint, UMaps, comonotonic_version,
                        countermono_existence, countermono_version, expectation_of,
                        sum_distribution)
from .dist import (Affine, Cauchy, ComonotonicSum, Discrete, Distribution, Mixture, Pareto,
                   PointMass, QuantileFunction, Uniform01, bernoulli)
from .extmath import DEFAULT_CONFIG, INF, MeanClass, MeanKind, QuadConfig
from .multiorder import (LatticeDist, check_concordance, check_sm_lattice,
                         search_concordance_not_sm)
from .orders import (Certification, OrderVerdict, Result, Witness, check_cx, check_cx_dagger,
                     check_cx_tails, check_dcx, check_icx, check_order, check_st,
                     cx_bruteforce_oracle)
from .ot import assignment_oracle, builtin_cost, ot_extremes_supermodular

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "Cauchy",
    "Certification",
    "ComonotonicSum",
    "CtExistence",
    "CtNotExists",
    "DEFAULT_CONFIG",
    "Discrete",
    "DiscreteJoint",
    "Distribution",
    "INF",
    "LatticeDist",
    "MeanClass",
    "MeanKind",
    "Mixture",
    "OrderVerdict",
    "Pareto",
    "PointMass",
    "QuadConfig",
    "QuantileFunction",
    "Result",
    "UMaps",
    "Uniform01",
    "Witness",
    "assignment_oracle",
    "bernoulli",
    "builtin_cost",
    "check_concordance",
    "check_cx",
    "check_cx_dagger",
    "check_cx_tails",
    "check_dcx",
    "check_icx",
    "check_order",
    "check_sm_lattice",
    "check_st",
    "comonotonic_version",
    "countermono_existence",
    "countermono_version",
    "cx_bruteforce_oracle",
    "expectation_of",
    "ot_extremes_supermodular",
    "search_concordance_not_sm",
    "sum_distribution",
]
