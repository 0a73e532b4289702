"""Numerical core: dense oracle, compositions, seed sampling and closed-form features."""
