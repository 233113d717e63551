"""crolab: chemical reaction optimization with pluggable perturbation laws.

A population-based metaheuristic where candidate solutions (molecules) are
transformed by four reaction operators under an energy-conservation
acceptance rule, plus the benchmark suite and experiment harness used to
compare the perturbation distributions.
"""

from .backends import available_backends, backend_name, run_cell, sample_values
from .benchmarks import (FE_LIMITS, FUNCTION_IDS, BenchmarkFunction, evaluate,
                         get_function, out_of_bounds_evaluations,
                         reset_out_of_bounds_tally, suite)
from .distributions import (KINDS, PerturbationSpec, pdf, pdf_cauchy,
                            pdf_exponential_mirrored, pdf_gaussian,
                            pdf_modified_rayleigh, pdf_rayleigh, sample,
                            sample_many, step)
from .engine import (EngineState, Molecule, Parameters, RunResult,
                     default_parameters, initialize, preset, run,
                     total_energy)
from .experiment import (ExperimentPlan, RunRecord, SummaryRow,
                         category_average_ranks, rank_variants, run_plan,
                         summarize)
from .rng import RandomSource, derive_seed

__version__ = "0.1.0"
