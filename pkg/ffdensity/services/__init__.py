"""Services layer - density harness and measure computations"""
