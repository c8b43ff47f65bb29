"""Buoyancy/battery resource planning and mission simulation for underwater
block construction."""

__version__ = "0.1.0"
