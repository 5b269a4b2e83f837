"""Unsupervised early-fault detection for turbofan sensor trajectories."""

__version__ = "0.1.0"
