"""Generative feedforward+LSTM pen-trajectory model with inference-time
acquisition, classification, variant generation and blending."""

__version__ = "0.1.0"

from . import analysis, corpus, network, oneshot, templates, training  # noqa: F401
from .backend import active_backend  # noqa: F401
