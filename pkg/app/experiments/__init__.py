"""Scenario files, horizon sweeps and result tables."""
