"""Exact density formulas, local measures and their brute-force oracles"""
