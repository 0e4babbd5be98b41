"""RF-FSO Secrecy - secrecy metrics of dual-hop RF-FSO links."""

__version__ = "0.1.0"
