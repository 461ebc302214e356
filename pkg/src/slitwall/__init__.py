"""Double-slit model with a movable, quantum slit-wall."""

__version__ = "0.1.0"
