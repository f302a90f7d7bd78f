"""Replay storage and prior datasets."""

from .buffer import Batch, ReplayBuffer, Transition, sample_batch, sample_from, sample_with_quota
from .dataset import (
    DATASET_SUFFIX,
    DatasetFile,
    DatasetHeader,
    load_dataset,
    make_dataset,
    save_dataset,
    take_last_k,
)

__all__ = [
    "Batch",
    "DATASET_SUFFIX",
    "DatasetFile",
    "DatasetHeader",
    "ReplayBuffer",
    "Transition",
    "load_dataset",
    "make_dataset",
    "sample_batch",
    "sample_from",
    "sample_with_quota",
    "save_dataset",
    "take_last_k",
]
