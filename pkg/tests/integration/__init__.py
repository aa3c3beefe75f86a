"""Acceptance suites spanning several stages."""
