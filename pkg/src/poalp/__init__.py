"""Price of anarchy of resource-allocation games as linear programs.

Compute PoA(f, w, n) exactly, design the mechanism f that maximizes it,
build worst-case games attaining it and check everything against brute force.
"""

from .core import (
    IndexTriple,
    Mechanism,
    WelfareBasis,
    enumerate_boundary_set,
    enumerate_index_set,
    preset_mechanism,
    preset_welfare,
)
from .design import DesignResult, optimize_mechanism, rescale_mechanism
from .errors import (
    InternalError,
    InvalidArgumentError,
    NumericFailure,
    PoaError,
    PreconditionError,
    ResourceLimitError,
)
from .games import GameInstance
from .kernels import BACKEND
from .lpsolve import LpProblem, LpSolution, solve_lp
from .oracle import FamilySpec, brute_force_poa
from .poa import PoaReport, poa
from .witness import WitnessGame, build_worst_case

__version__ = "0.1.0"
