"""Utility helpers - formatting, parsing, randomness"""
