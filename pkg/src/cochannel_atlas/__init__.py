"""Quantify co-channel overpowering attacks on terrestrial DVB-T/T2 broadcasts."""

__version__ = "0.1.0"
