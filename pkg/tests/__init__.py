"""Tests for the KR toolkit."""
