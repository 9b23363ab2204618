"""Tests for the estimation package."""
