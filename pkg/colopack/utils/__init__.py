"""Formatting and document I/O helpers."""
