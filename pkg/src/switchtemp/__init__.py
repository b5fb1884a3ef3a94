"""Regime-switching Levy temperature model: characteristic functions, Esscher calibration, simulation."""

from .charfn import CharFnEngine, phi_T, phi_T_historical, phi_W, phi_W_historical
from .config import RunConfig, load_config, parse_config
from .errors import (BranchCutError, ConfigError, DivergentMGF, DomainError, NegativeProbability, NoBracket,
                     NonConvergence, NonFiniteIntegrand, SwitchTempError, TruncationWarning)
from .esscher import EsscherSolution, solve_emm
from .mc_oracle import SimConfig, simulate_batch
from .model import EvalContext, ModelParams, c1, desk_params, seasonal
from .noise import NoiseSpec, SubordinatorKind, SubordinatorSpec
from .numerics import QuadratureConfig
from .regimes import CountTruncation, RegimeRates, count_prob, count_probs
from .specfun import SeriesControl

__version__ = "0.1.0"
