"""Tests for the oracles package."""
