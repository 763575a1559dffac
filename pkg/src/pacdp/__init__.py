"""pacdp: differentially private two-group mean-difference inference for
zero-inflated, right-skewed data, via partitioning and censoring."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .combine import CombinedInference, combine
from .errors import (ConfigError, DegenerateDataError, EstimationError,
                     InvalidArgument, PacdpError)
from .estimators import (Inference, McmcConfig, Method, MethodSpec,
                         PointEstimate, estimate_2s, estimate_pac,
                         mle_censored, naive_plugin, nonprivate_censored_mle,
                         posterior_mh, trimmed_plugin, trimmed_stats,
                         two_stat_plugin, winsorized_plugin, winsorized_stats)
from .likelihood import (CensoredStats, censored_loglik, censored_loglik_d2theta,
                         censored_loglik_dtheta)
from .partition import (CensoredData, CensoredSummaries, censor,
                        censored_summaries, partition_and_difference,
                        recompute_with_sanitized_bounds, sample_quantile,
                        trim_to_divisible)
from .privacy import (Flavor, GlobalBounds, MechanismSpec, PrivacyBudget,
                      compose, exp_mech_epsilon, gaussian_sanitize,
                      laplace_sanitize, make_rng, split_budget,
                      zcdp_to_approx_dp)
from .quantile import QuantileRequest, private_quantile, selection_weights
from .simulate import (GaussianModel, MetricsRow, ScenarioConfig, ZilnModel,
                       ZinbModel, gen_gaussian, gen_ziln, gen_zinb,
                       run_scenario)

__version__ = "0.1.0"
