"""t-holomorphic functions."""
