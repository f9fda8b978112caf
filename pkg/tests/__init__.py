"""
Test suite for the sparse sensitivity toolkit.
"""
