"""
Smooth-blending variation operators
===================================

Crossover and mutation edit waveforms through a cosine cross-fade, so a
child transitions smoothly between sources instead of splicing with a
discontinuity. Mutation pulls material from the SSA-denoised reference
set and touches nothing outside its window.
"""

import numpy as np

from morphcf import (BlendParams, SsaConfig, blend_weights,
                     build_reference_set, crossover, init_population, mutate,
                     synth_ppg_dataset)

# --- the cosine weights --------------------------------------------------
# With the defaults (beta=1, eta=0.5, nu=0.5) the fade starts at weight 1
# (all "own" signal) and ends at 0 (all "other" signal).
w = blend_weights(9, BlendParams())
print("cosine fade over a 9-sample interval:")
print(" ", np.round(w, 3))

# --- reference set: SSA-smoothed training waveforms ----------------------
train = synth_ppg_dataset([60, 75, 90, 105, 120], 8.0, 125.0, 0.05, seed=0)
refset = build_reference_set(train, SsaConfig(window_len=250, n_components=2))
print(f"\nreference set: {len(refset)} denoised waveforms of length "
      f"{len(refset.members[0])}")

# --- initialization ------------------------------------------------------
# Each initial candidate is a reference waveform plus a random edit-window
# length in [gamma, T/2].
pop = init_population(refset, P=6, gamma=50, seed=1)
print("initial window lengths:", [c.window_len for c in pop])

# --- crossover -----------------------------------------------------------
a, b = pop[0], pop[1]
c1, c2 = crossover(a, b, BlendParams(), seed=2)
inside = np.mean(
    (c1.waveform.values >= np.minimum(a.waveform.values, b.waveform.values) - 1e-12)
    & (c1.waveform.values <= np.maximum(a.waveform.values, b.waveform.values) + 1e-12)
)
print(f"\ncrossover child stays inside the parents' envelope: "
      f"{inside:.0%} of samples")
print(f"children inherit windows: {c1.window_len}, {c2.window_len}")

# --- mutation ------------------------------------------------------------
m = mutate(a, refset, BlendParams(), seed=3)
changed = np.flatnonzero(m.waveform.values != a.waveform.values)
print(f"\nmutation edited samples {changed[0]}..{changed[-1]} "
      f"(window {a.window_len}); everything outside is a bit-exact copy: "
      f"{np.array_equal(np.delete(m.waveform.values, changed), np.delete(a.waveform.values, changed))}")
