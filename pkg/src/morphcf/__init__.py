"""Morphology-aware counterfactual explanations for time-series extrinsic
regression, with an evolutionary multi-objective search over waveforms and
counterfactual-dispersion uncertainty probes."""

from .series import (Dataset, LabeledSeries, TimeSeries, parse_ts_dataset,
                     synth_ppg, synth_ppg_dataset, train_test_split_bootstrap,
                     write_ts_dataset)
from .signal_ops import (Spectrum, SsaConfig, default_dtw_band,
                         default_ssa_config, dft_magnitudes, dtw, percentile,
                         ssa_reconstruct)
from .descriptors import DESCRIPTOR_NAMES, PropertyProfile, profile
from .objectives import (MorphSpec, ObjectiveVector, TargetSpec,
                         evaluate_candidate, morph_loss, out_loss)
from .operators import (BlendParams, Candidate, ReferenceSet, blend_weights,
                        build_reference_set, crossover, init_population, mutate)
from .nsga3 import (CfeArchive, GenStats, RunConfig, hypervolume,
                    non_dominated_sort, reference_points, run)
from .regressors import (Ensemble, KnnDtwRegressor, RidgeDescriptorRegressor,
                         SpectralRateRegressor, augment_with_reference,
                         ensemble_predict_all, fit_bootstrap_ensemble,
                         knn_dtw_regressor, ridge_descriptor_regressor,
                         spectral_rate_regressor)
from .metrics import (EvalReport, evaluate_cfe_set, frequency_sparsity,
                      nun_baseline, plausibility, proximity, temporal_sparsity,
                      validity)
from .uncertainty import (BinReport, DescriptorKde, InstanceUncertainty,
                          bin_report, central_interval_width, cfe_dispersion,
                          kde_nll)
from .config import ExperimentConfig

__version__ = "0.1.0"
