"""gaplab: closed-loop reality-gap evaluation for small-scale driving stacks."""

__version__ = "0.1.0"
