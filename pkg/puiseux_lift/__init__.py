"""Exact verifier for the lifting construction on Puiseux monoids."""
