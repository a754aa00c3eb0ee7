"""Input-side robustness degradations for aligner training.

Order is fixed: Gaussian noise, then feedback passes (re-feeding the model's
own no-gradient output, approximating sequential generation), then random
frame replacement from the same utterance. Targets stay untouched; only the
shifted input is degraded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn_core import Tensor, no_grad
from .model import shift_frames


@dataclass(frozen=True)
class AugmentParams:
    noise_std: float = 0.02
    max_feedback_passes: int = 3
    replace_prob: float = 0.05


def augment_spectrogram(mel, model, rng, params, phoneme_ids, feedback_passes=None,
                        position_rate=None):
    """Degrade one unit-interval spectrogram (bins, T).

    feedback_passes: fixed k, or None to draw uniformly from
    {0..max_feedback_passes}.
    """
    x = np.asarray(mel, dtype=np.float32).copy()
    bins, t = x.shape
    if params.noise_std > 0:
        x = np.clip(x + rng.normal(0.0, params.noise_std, x.shape), 0.0, 1.0)
        x = x.astype(np.float32)
    k = (feedback_passes if feedback_passes is not None
         else int(rng.integers(0, params.max_feedback_passes + 1)))
    if k > 0:
        ids = np.asarray(phoneme_ids, dtype=np.int64)[None]
        rate = position_rate if position_rate is not None else ids.shape[1] / t
        was_training = model.training
        model.eval()
        with no_grad():
            for _ in range(k):
                pred, _ = model(ids, Tensor(shift_frames(x)[None]), [rate])
                x = pred.data[0].astype(np.float32)
        model.train(was_training)
    if params.replace_prob > 0:
        snapshot = x.copy()
        chosen = rng.random(t) < params.replace_prob
        sources = rng.integers(0, t, size=t)
        x[:, chosen] = snapshot[:, sources[chosen]]
    return x
