"""Distributional-transform expansion toolkit for CVQKD reconciliation.

Quantizes Gaussian raw keys into independent Bernoulli(1/2) bit planes,
characterizes the binary sub-channels each plane induces, and computes the
maximum reconciliation efficiency for direct and reverse reconciliation
under homodyne and heterodyne detection.
"""

from .channel import (AwgnModel, ChannelParams, Detection, RawKeyPair,
                      UnreachableSnrError, awgn_model, params_for_target_snr,
                      raw_keys_from_csv, raw_keys_to_csv, repeat_seed,
                      sample_raw_keys, snr, snr_db)
from .estimators import (Direction, MiEstimatorConfig, MiMethod,
                         SubChannelReport, binary_entropy, marginal_dists,
                         mi_bit_continuous_knn, mi_bit_continuous_oracle,
                         mi_gaussian_analytic, reports_from_csv,
                         reports_to_csv, subchannel_report, transition_probs)
from .recon import (EfficiencyEstimate, EfficiencyPoint, EfficiencySweep,
                    MonteCarloSettings, ReconFrames,
                    conditional_entropy_identity, dte_reconcile_frames,
                    max_efficiency, run_sweep, secret_key_rate,
                    sweep_from_csv, sweep_to_csv, sweep_to_json)
from .transform import (BitMatrix, DteConfig, EmpiricalCdf, GaussianCdf,
                        binary_expand, dte, dte_sequence, normal_cdf,
                        normal_quantile)

__version__ = "0.1.0"
