"""Utilities and helper functions.

- exceptions: qslkit exception hierarchy
- logging: loguru configuration
- persistence: JSON store and deterministic JSON/CSV emitters
"""
