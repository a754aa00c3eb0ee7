"""Corpus ingestion, phoneme tokenization, mel extraction, Griffin-Lim."""

from .vocab import PAD, WORD_BOUNDARY, PhonemeVocabulary, tokenize_text
from .lexicon import LEXICON
from .mel import (
    MAX_DB,
    MIN_DB,
    AudioConfig,
    corpus_stats,
    denormalize_standard,
    denormalize_unit,
    frame_count,
    hann_window,
    mel_filterbank,
    filter_centers_hz,
    normalize_standard,
    normalize_unit,
    stft_magnitude,
    wav_to_mel,
)
from .griffin_lim import griffin_lim, istft, mel_to_linear_magnitude, spectral_convergence
from .dataset import (
    DatasetError,
    Utterance,
    load_dataset,
    load_wav,
    read_durations,
    save_wav,
    write_durations,
)

__all__ = [
    "PAD",
    "WORD_BOUNDARY",
    "PhonemeVocabulary",
    "tokenize_text",
    "LEXICON",
    "MAX_DB",
    "MIN_DB",
    "AudioConfig",
    "corpus_stats",
    "denormalize_standard",
    "denormalize_unit",
    "frame_count",
    "hann_window",
    "mel_filterbank",
    "filter_centers_hz",
    "normalize_standard",
    "normalize_unit",
    "stft_magnitude",
    "wav_to_mel",
    "griffin_lim",
    "istft",
    "mel_to_linear_magnitude",
    "spectral_convergence",
    "DatasetError",
    "Utterance",
    "load_dataset",
    "load_wav",
    "read_durations",
    "save_wav",
    "write_durations",
]
