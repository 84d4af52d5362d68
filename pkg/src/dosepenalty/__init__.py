"""Volumetric dose penalties for optimal control of the heat equation.

Semismooth Newton with Moreau-Yosida regularisation and gamma continuation,
plus quadratic penalisation of pointwise dose constraints for comparison.
"""

from .boxpen import box_energy, eval_F_box, eval_T_box, apply_newton_operator_box, run_box_experiment
from .config import ExperimentConfig, build_experiment, load_config, write_config
from .dose import DvhCurve, apply_C, apply_C_adjoint, dvh_curve, volume_fraction_above, volume_fraction_below
from .grid import (
    ConfigurationError,
    DimensionError,
    DoseField,
    Region,
    SpaceTimeGrid,
    build_grid,
    inner_product_Q,
    make_region,
    norm_Q,
    regions_overlap,
)
from .heat import HeatModel, apply_S0, apply_S0_adjoint, inner_product_V, norm_V, solve_state
from .homotopy import HomotopyRecord, HomotopySchedule, default_gamma0, run_homotopy
from .penalty import CONSTRAINT, PENALTY, PenaltyConfig
from .ssn import (
    DoseProblem,
    SsnSettings,
    SsnTrace,
    apply_newton_operator,
    eval_F,
    eval_T,
    eval_unregularized_residual,
    regularized_energy,
    ssn_solve,
)

__version__ = "0.1.0"
