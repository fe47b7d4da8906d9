"""Data models - Pydantic models for experiments, reports and CLI configuration"""
