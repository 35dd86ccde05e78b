"""EEG-driven home automation: SSVEP selection, blink confirmation, room localization."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
