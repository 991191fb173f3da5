"""Contrastive pairs and encoder fine-tuning, step by step.

Builds a toy two-class dataset, shows the generated pair set, and watches
the squared cosine-similarity loss fall as the encoder trains.

Run:  python demos/01_pairs_and_encoder.py
"""

import numpy as np

from deskfit import (
    Dataset,
    LabeledExample,
    FinetuneConfig,
    cosine,
    encode,
    finetune,
    generate_pairs,
    init_params,
    max_unique_pairs,
    pair_loss,
)

# Two tiny classes with disjoint vocabularies: fruit talk vs engine talk.
texts = [
    ("ripe apple pear orchard", 0),
    ("sweet plum cherry basket", 0),
    ("fresh mango peach grove", 0),
    ("juicy grape melon vine", 0),
    ("diesel piston torque engine", 1),
    ("turbo exhaust valve cylinder", 1),
    ("crankshaft ignition throttle rpm", 1),
    ("gearbox clutch axle chassis", 1),
]
train = Dataset(
    tuple(LabeledExample(t, y) for t, y in texts), ("fruit", "engine")
)

print(f"{len(train.examples)} examples, {train.n_classes} classes")
print(f"unique unordered pairs available: {max_unique_pairs(len(train.examples))}")

# R pairs per class per polarity -> |T| = 2 * R * |C|
pairs = generate_pairs(train, r=10, seed=42)
print(f"\ngenerated {len(pairs.pairs)} pairs (R={pairs.r}, |C|={pairs.class_count})")
for p in pairs.pairs[:3]:
    print(f"  target {p.target:.0f}:  {p.first!r}  /  {p.second!r}")

# A small encoder: hashed bag of embeddings, mean pooled.
params = init_params(vocab_buckets=4096, dim=32, hash_seed=1, init_seed=7)

def mean_loss(p):
    return float(np.mean([pair_loss(p, pair) for pair in pairs.pairs]))

def class_cosines(p):
    same = cosine(encode(p, texts[0][0]), encode(p, texts[1][0]))
    cross = cosine(encode(p, texts[0][0]), encode(p, texts[4][0]))
    return same, cross

print(f"\nbefore training: mean pair loss {mean_loss(params):.4f}")
same, cross = class_cosines(params)
print(f"  cos(fruit, fruit) = {same:+.3f}   cos(fruit, engine) = {cross:+.3f}")

for epoch in range(1, 6):
    params = finetune(
        params, pairs, FinetuneConfig(learning_rate=5e-3, epochs=1, seed=epoch)
    )
    print(f"after epoch {epoch}: mean pair loss {mean_loss(params):.4f}")

same, cross = class_cosines(params)
print(f"\nafter training:")
print(f"  cos(fruit, fruit) = {same:+.3f}   cos(fruit, engine) = {cross:+.3f}")
print("same-class pairs moved toward cosine 1, cross-class pairs toward 0")
