"""Spiking joint source-channel coding: python surface over the C++ core."""

from ._core import (
    ConfigError,
    IoError,
    LabeledExample,
    SpikeTensor,
    channel_step,
    default_config_json,
    evaluate_checkpoint_file,
    generate_synthetic_dataset,
    load_dataset,
    log_loss,
    measure_density,
    quantize,
    rate_decode,
    run_training,
    save_dataset,
    sigma2_from_snr,
    spike_probability,
    target_spike_train,
    train_and_save,
)

__all__ = [
    "ConfigError",
    "IoError",
    "LabeledExample",
    "SpikeTensor",
    "channel_step",
    "default_config_json",
    "evaluate_checkpoint_file",
    "generate_synthetic_dataset",
    "load_dataset",
    "log_loss",
    "measure_density",
    "quantize",
    "rate_decode",
    "run_training",
    "save_dataset",
    "sigma2_from_snr",
    "spike_probability",
    "target_spike_train",
    "train_and_save",
]
