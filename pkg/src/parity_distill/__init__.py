"""Exact simulation of parity-check distillation of maximally entangled two-boson states."""

__version__ = "0.1.0"
