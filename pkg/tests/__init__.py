"""Test suite for colopack."""
