"""Two-component sparse signal separation with coherence-based guarantees.

The core program is::

    minimize ||Psi1 x1||_1 + ||Psi2 x2||_1  subject to  ||y - A1 x1 - A2 x2||_2 <= eps

covering analysis, synthesis and hybrid sparsity models.
"""

from .coherence import CoherenceProfile, coherence, effective_dictionary, mutual_coherence, profile
from .errors import *  # noqa: F401,F403
from .guarantees import RecoveryCertificate, certify, threshold_single, threshold_split
from .matrix_core import gram, pseudoinverse
from .problems import (
    Flavor,
    SeparationProblem,
    from_analysis,
    from_blocks,
    from_hybrid,
    from_synthesis,
    split_solution,
)
from .solver import SolveOptions, SolveResult, check_lemmas, oracle_solve, solve_p_star, solve_separation
from .sparsity import IndexSet, sigma_k, supp_k

__version__ = "0.1.0"
