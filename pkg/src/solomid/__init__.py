"""1v1 mid-lane bot matches: deterministic sim, JSON/HTTP bot protocol, ranked series."""

__version__ = "1.0.0"
