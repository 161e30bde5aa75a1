"""
Test suite for the BMW workbench.
"""
