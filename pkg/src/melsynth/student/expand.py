"""Duration-driven expansion of phoneme encodings to frame rate.

Each phoneme's encoding vector is repeated for its duration; a sinusoidal
positional term is added whose position restarts at 0 on the first frame of
every phoneme, marking intra-phoneme progress.
"""

from __future__ import annotations

import numpy as np

from ..nn_core import functional as F


def expansion_indices(durations):
    """Frame -> phoneme index map; length = sum(durations)."""
    durations = np.asarray(durations, dtype=np.int64)
    if np.any(durations < 0):
        raise ValueError("negative duration")
    if durations.sum() < 1:
        raise ValueError("all durations zero; nothing to expand")
    return np.repeat(np.arange(durations.shape[0]), durations)


def reset_positions(durations):
    """Per-frame position that restarts at 0 at each phoneme boundary."""
    durations = np.asarray(durations, dtype=np.int64)
    total = int(durations.sum())
    starts = np.repeat(np.cumsum(durations) - durations, durations)
    return np.arange(total, dtype=np.int64) - starts


def expand_encodings(encodings, durations, pe_dim=None):
    """Expand (batch, channels, N) by per-item durations (batch, N).

    Items may expand to different lengths; the result is zero padded on the
    right. Returns (expanded (batch, channels, T_max), frame_mask
    (batch, 1, T_max), lengths (batch,)).
    """
    durations = np.atleast_2d(np.asarray(durations, dtype=np.int64))
    batch, channels, _ = encodings.shape
    pe_dim = channels if pe_dim is None else pe_dim
    lengths = durations.sum(axis=1)
    if np.any(lengths < 1):
        raise ValueError("all durations zero; nothing to expand")
    t_max = int(lengths.max())
    gather = np.zeros((batch, t_max), dtype=np.int64)
    positions = np.zeros((batch, t_max), dtype=np.int64)
    frame_mask = np.zeros((batch, 1, t_max), dtype=np.float32)
    for i in range(batch):
        t_i = int(lengths[i])
        gather[i, :t_i] = expansion_indices(durations[i])
        positions[i, :t_i] = reset_positions(durations[i])
        frame_mask[i, 0, :t_i] = 1.0
    expanded = F.gather_time(encodings, gather)
    pe = np.stack([F.sinusoid_table(positions[i], pe_dim) for i in range(batch)])
    pe *= frame_mask  # keep padded cells exactly zero
    out = F.mul(F.add(expanded, pe), frame_mask)
    return out, frame_mask, lengths
