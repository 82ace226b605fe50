"""Shipped experiment presets (JSON)."""
