"""Online graph coloring: exact solver, strategy arena and hardness gadgets."""

__version__ = "0.1.0"
