"""evsepot: a decoy EV charging station with a believable charging process."""

__version__ = "0.1.0"
