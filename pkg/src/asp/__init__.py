"""Unified adaptive filtering and iterative solvers built on one correction equation."""
