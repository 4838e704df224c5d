"""Centralizing sequences and i-numbers of p-divisible groups via Dieudonne modules."""

__version__ = "0.1.0"
