"""Crossbar analog matrix computing simulator with interconnect resistance"""

__version__ = "0.1.0"
