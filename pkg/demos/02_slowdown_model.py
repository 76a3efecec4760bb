"""
Training the slowdown predictor
===============================

The predictor is a small fully connected network: 40 inputs (4 knob
states + two 18-counter blocks), two hidden layers of 18 ReLU units, and
one ReLU output, trained with plain mini-batch SGD on mean squared
error.  Ground truth comes from the synthetic analytic oracle, so the
whole loop runs on a laptop: sample jobs, label random pairs under every
co-run configuration, train, and check the held-out pairs.
"""

import numpy as np

from cosched.core import default_space
from cosched.fnn import TrainingConfig, forward_batch, load_weights, save_weights, train
from cosched.simenv import OracleParams, generate_dataset

space = default_space(400.0)
params = OracleParams(noise_sigma=0.0)

# 16 random pairs x 100 co-run configs x both orderings = 3,200 points;
# 12 pairs train, 4 pairs held out (the split never shares a pair).
dataset = generate_dataset(params, space, seed=0)
train_samples = dataset.samples("train")
test_rows = dataset.rows_for("test")
print(f"corpus: {len(dataset.rows)} points, {len(train_samples)} train, "
      f"{len(test_rows)} held-out")

# A short schedule for demonstration; the acceptance suite trains longer.
cfg = TrainingConfig(learning_rate=0.002, batch_size=2, epochs=60, seed=2,
                     validation_fraction=0.05)
weights, history = train(train_samples, cfg, feature_bounds=dataset.bounds)
print(f"epoch {history[0].epoch}: train MSE {history[0].train_mse:.4f}")
print(f"epoch {history[-1].epoch}: train MSE {history[-1].train_mse:.4f}, "
      f"val MSE {history[-1].val_mse:.4f}")

X = np.stack([r.sample.input for r in test_rows])
targets = np.array([r.sample.target for r in test_rows])
pred = forward_batch(weights, X)
mse = float(np.mean((pred - targets) ** 2))
mare = float(np.mean(np.abs(pred - targets) / targets))
print(f"held-out pairs: MSE {mse:.4f}, mean abs relative error {mare * 100:.1f}%")

# Weights round-trip through a versioned JSON document, normalization
# bounds included, so inference always scales inputs the same way.
save_weights(weights, "demo_weights.json")
reloaded = load_weights("demo_weights.json")
assert float(forward_batch(reloaded, X[:1])[0]) == float(forward_batch(weights, X[:1])[0])
print("weights saved to demo_weights.json and reloaded bit-identically")
