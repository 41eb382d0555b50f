"""
Uncertainty probes: bootstrap ensembles, counterfactual dispersion, KDE
=======================================================================

Three complementary views of where the regressor is unsure: (1) the
spread of a bootstrap ensemble's predictions, (2) the dispersion of
ensemble predictions over a query's counterfactual archive, and (3) a
kernel-density estimate of how well the query's morphology is supported
by the training data. Instances are finally binned by ground-truth label
to surface under-covered regions.
"""

import numpy as np

from morphcf import (DescriptorKde, InstanceUncertainty, MorphSpec, RunConfig,
                     SsaConfig, TargetSpec, bin_report, build_reference_set,
                     central_interval_width, cfe_dispersion,
                     ensemble_predict_all, fit_bootstrap_ensemble,
                     knn_dtw_regressor, run, synth_ppg_dataset)

# Training labels deliberately omit the 90-105 bpm band.
rng = np.random.default_rng(0)
labels = [v for v in rng.uniform(60, 120, size=60) if not 90 <= v < 105][:40]
train = synth_ppg_dataset(labels, 8.0, 125.0, 0.02, seed=1,
                          amplitude_jitter=0.05)
refset = build_reference_set(train, SsaConfig(250, 2))
regressor = knn_dtw_regressor(train, k=3, band=20)

# --- bootstrap ensemble --------------------------------------------------
ensemble = fit_bootstrap_ensemble(
    train, n_boot=5, base=lambda d: knn_dtw_regressor(d, k=3, band=20), seed=2)
covered = synth_ppg_dataset([75.0], 8.0, 125.0, 0.02, seed=3)[0]
in_gap = synth_ppg_dataset([97.0], 8.0, 125.0, 0.02, seed=4)[0]
for item in (covered, in_gap):
    preds = ensemble_predict_all(ensemble, item.series)
    print(f"label {item.label:.0f}: ensemble predictions "
          f"{np.round(preds, 1)}, central-95% width "
          f"{central_interval_width(preds):.2f}")

# --- KDE support ---------------------------------------------------------
kde = DescriptorKde(train, bandwidth=0.3)
print(f"\nKDE negative log-likelihood: covered {kde.nll(covered.series):.2f}, "
      f"in-gap {kde.nll(in_gap.series):.2f} (higher = less supported)")

# --- counterfactual dispersion and the bin report ------------------------
per_instance = []
for i, item in enumerate((covered, in_gap)):
    target = TargetSpec(item.label, 5.0)
    archive = run(item.series, target, MorphSpec(), refset, regressor,
                  RunConfig(population=12, generations=5, seed=10 + i),
                  gamma=50)
    disp = cfe_dispersion(archive, ensemble)
    per_instance.append(InstanceUncertainty(
        label=item.label,
        bootstrap_ci_width=central_interval_width(
            ensemble_predict_all(ensemble, item.series)),
        cfe_ci_width=disp.ci_width,
        cfe_variance=disp.variance,
        kde_nll=kde.nll(item.series),
    ))
    print(f"\nlabel {item.label:.0f}: archive {len(archive)}, "
          f"counterfactual prediction variance {disp.variance:.2f}")

print("\nbin report (label-binned means):")
for r in bin_report(per_instance, [60, 90, 105, 120]):
    nll = "-" if r.mean_kde_nll is None else f"{r.mean_kde_nll:.2f}"
    var = "-" if r.mean_cfe_variance is None else f"{r.mean_cfe_variance:.2f}"
    print(f"  [{r.lo:5.1f}, {r.hi:5.1f}): n={r.n}, kde_nll={nll}, "
          f"cfe_variance={var}")
