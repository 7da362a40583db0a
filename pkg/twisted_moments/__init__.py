"""Desk-scale experiments for twisted modular L-functions."""
from .const import PACKAGE_VERSION

__version__ = PACKAGE_VERSION
