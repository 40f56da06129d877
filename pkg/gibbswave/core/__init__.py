"""Logging, configuration, errors, parallel fan-out and output records."""
