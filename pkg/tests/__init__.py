"""Test suite for entstruct."""
