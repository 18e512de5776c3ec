"""
gfcodebook: near-optimal complex codebooks from finite field towers.

Builds the two codebook families over F_p <= F_r <= F_q <= F_{q^2}, computes
their maximal cross-correlation amplitude against the Welch bound, and checks
the character sum identities behind them by exhaustive enumeration.
"""

from gfcodebook.version import __version__

from gfcodebook.core.analysis import (
    AnalysisReport,
    distribution_II,
    imax,
    imax_bound,
    ratio_report,
    welch_bound,
)
from gfcodebook.core.codebook_manager import CodebookManager, RunConfig
from gfcodebook.core.constructions import Codebook, DefiningSet, build_set_I, build_set_II, codebook_I, codebook_II
from gfcodebook.core.errors import BudgetExceededError, CodebookError, IntegrityError, ParameterError
from gfcodebook.core.field import TowerParams, build_field, build_tower

__all__ = [
    'AnalysisReport',
    'BudgetExceededError',
    'Codebook',
    'CodebookError',
    'CodebookManager',
    'DefiningSet',
    'IntegrityError',
    'ParameterError',
    'RunConfig',
    'TowerParams',
    'build_field',
    'build_set_I',
    'build_set_II',
    'build_tower',
    'codebook_I',
    'codebook_II',
    'distribution_II',
    'imax',
    'imax_bound',
    'ratio_report',
    'welch_bound',
    '__version__',
]
