"""Simulation core: network, demand, event loop, empty-vehicle management and metrics."""
