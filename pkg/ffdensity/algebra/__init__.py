"""Arithmetic substrate: F_q, F_q[x], places of F_q(x), holomorphy rings"""
