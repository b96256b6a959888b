"""Scenario definitions, Monte Carlo runner, file formats and CLI."""
