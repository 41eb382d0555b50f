"""
Counterfactual quality metrics and the nearest-unlike-neighbor baseline
=======================================================================

How good are the generated counterfactuals? This script scores an archive
on validity, plausibility, proximity, sparsity, and diversity, and
compares it with the classic baseline: return the DTW-nearest training
instance whose label already lies in the target interval.
"""

import numpy as np

from morphcf import (MorphSpec, RunConfig, SsaConfig, TargetSpec,
                     augment_with_reference, build_reference_set,
                     evaluate_cfe_set, nun_baseline, proximity,
                     ridge_descriptor_regressor, run, synth_ppg_dataset,
                     temporal_sparsity)

rng = np.random.default_rng(0)
train = synth_ppg_dataset(rng.uniform(60, 120, size=40), 8.0, 125.0, 0.02,
                          seed=1)
refset = build_reference_set(train, SsaConfig(250, 2))
regressor = ridge_descriptor_regressor(augment_with_reference(train, refset))

query = synth_ppg_dataset([72.0], 8.0, 125.0, 0.02, seed=2)[0]
target = TargetSpec(95.0, 5.0)
archive = run(query.series, target, MorphSpec(), refset, regressor,
              RunConfig(population=30, generations=10, seed=3), gamma=50)

# --- the evolutionary archive, scored ------------------------------------
report = evaluate_cfe_set(query.series, target, archive, train, regressor,
                          k=5, band=40)
print("archive metrics:")
print(f"  validity             {report.validity:.2f}  "
      "(fraction predicting inside the target interval)")
print(f"  plausibility         {report.plausibility:.2f}  "
      "(label agreement of DTW neighbors)")
print(f"  proximity            {report.proximity:.4f}  (DTW / T, lower=closer)")
print(f"  edited segments      {report.temporal_sparsity_segments:.1f}")
print(f"  frequency sparsity   {report.frequency_sparsity:.4f} nats")
print(f"  diversity            {report.diversity}  (distinct counterfactuals)")

# --- the NUN baseline ----------------------------------------------------
# One real training series per query, valid by construction but with zero
# diversity and typically much farther from the query.
nun = nun_baseline(query.series, target, train, band=40)
print(f"\nNUN baseline: training instance labeled {nun.label:.1f} bpm")
print(f"  proximity to query   {proximity(query.series, nun.series, band=40):.4f}")
print(f"  edited segments      "
      f"{temporal_sparsity(query.series, nun.series)}  (a wholesale swap)")
print("  diversity            1 candidate, archive offers "
      f"{report.diversity}")
