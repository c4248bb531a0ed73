"""Proximal decoding of LDPC codes over massive MIMO channels."""

__version__ = "0.1.0"
