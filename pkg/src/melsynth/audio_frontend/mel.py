"""STFT, mel filterbank, and the two spectrogram normalization regimes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# natural-log dynamic range of the clamped magnitudes; fixed so that
# unit-interval scaling is corpus independent
LOG_FLOOR = 1e-5
MIN_DB = float(np.log(LOG_FLOOR))
MAX_DB = 2.0


@dataclass(frozen=True)
class AudioConfig:
    sample_rate: int = 22050
    n_fft: int = 1024
    win_length: int = 1024
    hop_length: int = 256
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float = 8000.0


def hann_window(length):
    """Periodic Hann (sums to length/2 at any hop dividing the length)."""
    n = np.arange(length)
    return (0.5 - 0.5 * np.cos(2.0 * np.pi * n / length)).astype(np.float64)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(config=AudioConfig()):
    """(n_mels, n_fft//2+1) triangular filters, peak 1, HTK mel spacing."""
    n_bins = config.n_fft // 2 + 1
    fft_freqs = np.linspace(0.0, config.sample_rate / 2.0, n_bins)
    edges = mel_to_hz(np.linspace(hz_to_mel(config.fmin), hz_to_mel(config.fmax),
                                  config.n_mels + 2))
    fb = np.zeros((config.n_mels, n_bins))
    for m in range(config.n_mels):
        lo, center, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (fft_freqs - lo) / (center - lo)
        down = (hi - fft_freqs) / (hi - center)
        fb[m] = np.clip(np.minimum(up, down), 0.0, None)
    return fb


def filter_centers_hz(config=AudioConfig()):
    edges = mel_to_hz(np.linspace(hz_to_mel(config.fmin), hz_to_mel(config.fmax),
                                  config.n_mels + 2))
    return edges[1:-1]


def stft_magnitude(waveform, config=AudioConfig(), return_complex=False):
    """Centered STFT; magnitudes scaled by 2/sum(window).

    The scaling puts a full-scale sine near log-magnitude 0, so the fixed
    MIN_DB/MAX_DB range covers speech without corpus-dependent statistics.
    """
    x = np.asarray(waveform, dtype=np.float64)
    if x.size < config.win_length:
        raise ValueError(
            f"waveform of {x.size} samples is shorter than one window ({config.win_length})"
        )
    pad = config.n_fft // 2
    x = np.pad(x, pad, mode="reflect")
    window = hann_window(config.win_length)
    n_frames = 1 + (x.size - config.win_length) // config.hop_length
    idx = (np.arange(config.win_length)[None, :]
           + config.hop_length * np.arange(n_frames)[:, None])
    frames = x[idx] * window
    spec = np.fft.rfft(frames, n=config.n_fft, axis=1).T  # (bins, frames)
    scale = 2.0 / window.sum()
    if return_complex:
        return spec * scale
    return np.abs(spec) * scale


def wav_to_mel(waveform, config=AudioConfig()):
    """Log-mel spectrogram (n_mels, T), natural log, floor-clamped (raw_log)."""
    mag = stft_magnitude(waveform, config)
    mel = mel_filterbank(config) @ mag
    return np.log(np.maximum(mel, LOG_FLOOR)).astype(np.float32)


def frame_count(n_samples, config=AudioConfig()):
    """T for a centered STFT of n_samples: 1 + n_samples // hop."""
    return 1 + n_samples // config.hop_length


def normalize_unit(mel):
    """raw_log -> [0, 1] with the fixed corpus-independent range."""
    out = (np.asarray(mel, dtype=np.float32) - MIN_DB) / (MAX_DB - MIN_DB)
    return np.clip(out, 0.0, 1.0)


def denormalize_unit(mel):
    return np.asarray(mel, dtype=np.float32) * (MAX_DB - MIN_DB) + MIN_DB


def normalize_standard(mel, mean, std):
    """raw_log -> zero-mean/unit-variance given corpus scalar stats."""
    if std == 0:
        raise ValueError("corpus std is zero; cannot standardize")
    return ((np.asarray(mel, dtype=np.float32) - mean) / std).astype(np.float32)


def denormalize_standard(mel, mean, std):
    return (np.asarray(mel, dtype=np.float32) * std + mean).astype(np.float32)


def corpus_stats(mels):
    """Global scalar mean/std over every cell of every raw_log spectrogram."""
    total = 0.0
    total_sq = 0.0
    count = 0
    for mel in mels:
        m = np.asarray(mel, dtype=np.float64)
        total += m.sum()
        total_sq += (m * m).sum()
        count += m.size
    if count == 0:
        raise ValueError("no spectrograms given")
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return float(mean), float(np.sqrt(var))
