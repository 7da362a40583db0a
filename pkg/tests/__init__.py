"""Tests for twisted_moments."""
