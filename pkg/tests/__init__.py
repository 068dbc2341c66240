"""Test suite for Resource API."""

