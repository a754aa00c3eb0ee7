"""Waveform recovery: mel -> linear magnitude -> Griffin-Lim phase estimation."""

from __future__ import annotations

import numpy as np

from .mel import AudioConfig, hann_window, mel_filterbank, stft_magnitude

_PINV_CACHE = {}


def _filterbank_pinv(config):
    key = (config.n_fft, config.n_mels, config.fmin, config.fmax, config.sample_rate)
    if key not in _PINV_CACHE:
        _PINV_CACHE[key] = np.linalg.pinv(mel_filterbank(config))
    return _PINV_CACHE[key]


def mel_to_linear_magnitude(log_mel, config=AudioConfig()):
    """raw_log mel -> non-negative linear-frequency magnitude (bins, T)."""
    mel_mag = np.exp(np.asarray(log_mel, dtype=np.float64))
    return np.clip(_filterbank_pinv(config) @ mel_mag, 0.0, None)


def istft(spec, config=AudioConfig()):
    """Least-squares inverse of the centered STFT (window-squared overlap-add).

    `spec` carries the same 2/sum(window) scaling `stft_magnitude` applies;
    returns the de-padded waveform of length hop * (T - 1).
    """
    win = hann_window(config.win_length)
    spec = np.asarray(spec) / (2.0 / win.sum())
    n_frames = spec.shape[1]
    frames = np.fft.irfft(spec.T, n=config.n_fft, axis=1)[:, :config.win_length]
    frames *= win
    length = config.hop_length * (n_frames - 1) + config.win_length
    y = np.zeros(length)
    norm = np.zeros(length)
    wsq = win * win
    for i in range(n_frames):
        o = i * config.hop_length
        y[o:o + config.win_length] += frames[i]
        norm[o:o + config.win_length] += wsq
    y /= np.maximum(norm, 1e-10)
    pad = config.n_fft // 2
    return y[pad:length - pad]


def spectral_convergence(magnitude, waveform, config=AudioConfig()):
    """Relative Frobenius mismatch between |STFT(waveform)| and a target magnitude."""
    re = stft_magnitude(waveform, config)
    return float(np.linalg.norm(re - magnitude) / np.linalg.norm(magnitude))


def griffin_lim(log_mel, iterations=60, config=AudioConfig()):
    """Invert a raw_log mel spectrogram to a waveform, peak limited to <= 1.

    Classic fixed-point iteration: keep the target magnitude, re-estimate
    phase from the previous reconstruction. Zero initial phase keeps the
    output deterministic.
    """
    if iterations < 1:
        raise ValueError("griffin_lim needs at least one iteration")
    # the pseudo-inverse output carries the same scaling stft_magnitude applies
    magnitude = mel_to_linear_magnitude(log_mel, config)
    spec = magnitude.astype(np.complex128)
    y = istft(spec, config)
    if y.size < config.win_length:  # too short to re-analyze; keep zero phase
        iterations = 1
    for _ in range(iterations - 1):
        rebuilt = stft_magnitude(y, config, return_complex=True)
        phase = rebuilt / np.maximum(np.abs(rebuilt), 1e-12)
        y = istft(magnitude * phase, config)
    peak = np.max(np.abs(y)) if y.size else 0.0
    if peak > 0.95:
        y = y * (0.95 / peak)
    return y.astype(np.float32)
