"""ladderkit: content-optimized bitrate ladders for adaptive streaming."""

__version__ = "0.1.0"
