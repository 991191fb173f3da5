"""FLOPs cost estimates and relative speed-ups.

Reproduces a published-style comparison: a 3B encoder-decoder reference
against a 110M encoder, plus a 15M encoder whose published cost row is
inconsistent with its stated parameter count (see deskfit.cost.__doc__).

Run:  python demos/04_cost_model.py
"""

from deskfit import CostSpec, inference_flops, speedup, training_flops
from deskfit.cost import round_sig

rows = [
    ("3B encoder-decoder", CostSpec(n_params=3e9, seq_len=54, arch="encoder_decoder")),
    ("110M encoder", CostSpec(n_params=110e6, seq_len=38)),
    ("15M encoder", CostSpec(n_params=15e6, seq_len=38)),
]

reference = rows[0][1]
print(f"{'model':<20} {'inference':>12} {'training':>12} {'speed-up':>9}")
for name, spec in rows:
    print(
        f"{name:<20} {inference_flops(spec):>12.3e} {training_flops(spec):>12.3e} "
        f"{speedup(reference, spec):>8.1f}x"
    )

print("\nall training rows use n_steps=1000, n_batch=8;")
print("encoder-decoder costs are halved (each token passes one stack only)")

small = rows[2][1]
print(
    f"\nnote: a published table lists the 15M row as 1.3e9 / 3.2e13, but "
    f"2 * 15e6 * 38 = {inference_flops(small):.3e}"
)
implied = CostSpec(n_params=17.1e6, seq_len=38)
print(
    f"the printed pair is consistent with ~17.1M parameters instead "
    f"(2 * 17.1e6 * 38 = {round_sig(inference_flops(implied)):.1e})"
)
