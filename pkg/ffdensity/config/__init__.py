"""Configuration module - Settings, logging, etc."""
