"""Classifier under test: contracts, ReLU MLP, SGD training and checkpoints."""

from src.classifier.interfaces import BlackBoxClassifier, WhiteBoxClassifier, Objective
from src.classifier.mlp import MlpModel, as_batch, as_point, forward, predict_top1, grad_check
from src.classifier.training import TrainConfig, TrainResult, train_sgd, accuracy
from src.classifier.checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "BlackBoxClassifier",
    "WhiteBoxClassifier",
    "Objective",
    "MlpModel",
    "as_batch",
    "as_point",
    "forward",
    "predict_top1",
    "grad_check",
    "TrainConfig",
    "TrainResult",
    "train_sgd",
    "accuracy",
    "save_checkpoint",
    "load_checkpoint"
]
