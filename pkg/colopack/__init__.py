"""colopack: interference- and need-aware workload colocation."""

__version__ = "0.4.0"
