"""Core abstractions shared across the lab packages."""
