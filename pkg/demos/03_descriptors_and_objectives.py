"""
Morphology descriptors and the three-objective vector
=====================================================

Every waveform is summarized by a five-element property profile:
amplitude, dominant frequency, plateau fraction, trend slope, and max
gradient. A counterfactual is scored by how much it perturbs that profile
(weighted, normalized), how smooth it is, and how far its predicted value
sits from the target interval.
"""

from morphcf import (DESCRIPTOR_NAMES, MorphSpec, TargetSpec,
                     evaluate_candidate, morph_loss, out_loss, profile,
                     spectral_rate_regressor, synth_ppg)

x = synth_ppg(75.0, 8.0, 125.0, noise_std=0.02, seed=0).series

# --- the property profile ------------------------------------------------
p = profile(x)
print("property profile of a 75 bpm pulse train:")
for name, value in zip(DESCRIPTOR_NAMES, p.as_array()):
    print(f"  {name:18s} {value:10.4f}")

# --- morphology loss: deviations are relative to the query ---------------
# Doubling the signal doubles amplitude and max gradient but leaves the
# dominant frequency, plateau fraction, and (near-zero) trend untouched.
doubled = x.with_values(2.0 * x.values)
spec = MorphSpec()  # preserve all five, weights (1, 1, 1, 0.5, 0.5)
print(f"\nmorphology loss of an identical copy: {morph_loss(x, x, spec):.4f}")
print(f"morphology loss of a doubled copy:    {morph_loss(x, doubled, spec):.4f}")

# A change-mode entry rewards a *large* deviation instead: ask for a 30%
# amplitude change and the loss now penalizes staying put.
change_spec = MorphSpec(
    modes=("change", "preserve", "preserve", "preserve", "preserve"),
    thresholds=(0.3, 0.0, 0.0, 0.0, 0.0),
)
print(f"change-mode loss of an identical copy: "
      f"{morph_loss(x, x, change_spec):.4f} (hinge pays the full threshold)")

# --- target attainment ---------------------------------------------------
target = TargetSpec(label=90.0, tolerance=5.0)
for yhat in (88.0, 95.0, 103.0):
    loss, feasible = out_loss(target, yhat)
    print(f"prediction {yhat:5.1f} -> out loss {loss:4.1f}, "
          f"feasible={feasible}")

# --- the full objective vector -------------------------------------------
# evaluate_candidate composes all three plus the feasibility flag; an
# infeasible candidate carries a penalty into the morphology component so
# selection steers it back toward the target region.
regressor = spectral_rate_regressor()
vec = evaluate_candidate(x, x, MorphSpec(), target, regressor)
print(f"\nquery evaluated against a 90 bpm target: morph={vec.morph:.2f}, "
      f"maxgrad={vec.maxgrad:.4f}, out={vec.out:.2f}, feasible={vec.feasible}")
