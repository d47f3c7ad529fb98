"""Golden-path CI pipeline provisioning toolkit."""

__version__ = "0.1.0"
