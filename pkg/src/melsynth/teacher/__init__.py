"""Autoregressive aligner: model, losses, augmentation, duration extraction."""

from .model import NEG_INF, GatedStack, TeacherModel, shift_frames, teacher_dilations
from .losses import (
    batch_guided_attention_loss,
    diagonality_score,
    guided_attention_loss,
    guided_attention_weights,
    masked_mae,
)
from .align import (
    FORWARD_REACH,
    durations_from_attention,
    durations_from_path,
    extract_durations,
    masked_attention_path,
    sequential_generate,
    teacher_forced_logits,
)
from .augment import AugmentParams, augment_spectrogram
from .train import (
    batch_diagonality,
    build_inputs,
    iterate_minibatches,
    pad_teacher_batch,
    prepare_utterance,
    teacher_training_step,
)

__all__ = [
    "NEG_INF",
    "GatedStack",
    "TeacherModel",
    "shift_frames",
    "teacher_dilations",
    "batch_guided_attention_loss",
    "diagonality_score",
    "guided_attention_loss",
    "guided_attention_weights",
    "masked_mae",
    "FORWARD_REACH",
    "durations_from_attention",
    "durations_from_path",
    "extract_durations",
    "masked_attention_path",
    "sequential_generate",
    "teacher_forced_logits",
    "AugmentParams",
    "augment_spectrogram",
    "batch_diagonality",
    "build_inputs",
    "iterate_minibatches",
    "pad_teacher_batch",
    "prepare_utterance",
    "teacher_training_step",
]
