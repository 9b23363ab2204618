"""Test suite for ceta."""
