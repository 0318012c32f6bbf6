"""Version information for tembed."""
VERSION = "1.0.0"
