"""FLOPs cost estimates for inference and training, and relative speed-ups.

An encoder-only model with N parameters costs about 2N FLOPs per token at
inference and 6N per token during training, so

    inference_flops = 2 * n_params * seq_len
    training_flops  = 6 * n_params * seq_len * n_steps * n_batch

and both are halved for encoder-decoder architectures, which process each
token with only one of the two stacks. Speed-ups are ratios of inference
costs; with matching n_steps and n_batch the training ratio is identical.

Values are always computed from first principles from the spec fields.
Published compact tables are typically printed at two significant figures
and sometimes disagree with their own stated parameter counts: a row
listing 15e6 parameters alongside 1.3e9 inference FLOPs at sequence length
38 is consistent with roughly 17.1e6 parameters, not 15e6 (2 * 15e6 * 38 =
1.14e9). This module reports the computed values and leaves such
reconciliation to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidSpec

ARCHITECTURES = ("encoder_only", "encoder_decoder")


@dataclass(frozen=True)
class CostSpec:
    """Inputs of the cost model; all counts must be positive."""

    n_params: float
    seq_len: float
    arch: str = "encoder_only"
    n_steps: int = 1000
    n_batch: int = 8

    def __post_init__(self) -> None:
        if self.arch not in ARCHITECTURES:
            raise InvalidSpec(f"arch must be one of {ARCHITECTURES}, got {self.arch!r}")
        for name in ("n_params", "seq_len", "n_steps", "n_batch"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidSpec(f"{name} must be positive, got {value}")


def _arch_factor(spec: CostSpec) -> float:
    return 0.5 if spec.arch == "encoder_decoder" else 1.0


def inference_flops(spec: CostSpec) -> float:
    """2 * n_params * seq_len, halved for encoder-decoder models."""
    return 2.0 * spec.n_params * spec.seq_len * _arch_factor(spec)


def training_flops(spec: CostSpec) -> float:
    """6 * n_params * seq_len * n_steps * n_batch, halved for encoder-decoder."""
    return (
        6.0 * spec.n_params * spec.seq_len * spec.n_steps * spec.n_batch * _arch_factor(spec)
    )


def speedup(reference: CostSpec, candidate: CostSpec) -> float:
    """How many times cheaper the candidate's inference is than the reference's."""
    return inference_flops(reference) / inference_flops(candidate)


@dataclass(frozen=True)
class CostReport:
    inference_flops: float
    training_flops: float
    speedup: float


def cost_report(spec: CostSpec, reference: CostSpec | None = None) -> CostReport:
    """Costs for a spec plus its speed-up relative to `reference` (or itself)."""
    ref = reference if reference is not None else spec
    return CostReport(inference_flops(spec), training_flops(spec), speedup(ref, spec))


def round_sig(x: float, figures: int = 2) -> float:
    """Round to `figures` significant figures (half away from zero)."""
    if x == 0:
        return 0.0
    magnitude = math.floor(math.log10(abs(x)))
    quantum = 10.0 ** (magnitude - figures + 1)
    return math.floor(abs(x) / quantum + 0.5) * quantum * (1 if x > 0 else -1)
