from .layout import ModelLayout
from .adam import AdamState, adam_step
from .autoencoder import (
    AutoencoderModel,
    LstmLayerParams,
    lstm_cell_forward,
    encode,
    decode,
    reconstruct,
    reconstruction_loss,
    backward,
    save_model,
    load_model,
)
from .training import TrainConfig, train_autoencoder

__all__ = [
    "ModelLayout",
    "AdamState",
    "adam_step",
    "AutoencoderModel",
    "LstmLayerParams",
    "lstm_cell_forward",
    "encode",
    "decode",
    "reconstruct",
    "reconstruction_loss",
    "backward",
    "save_model",
    "load_model",
    "TrainConfig",
    "train_autoencoder",
]
