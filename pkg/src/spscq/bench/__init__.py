"""Benchmark harness: raw transfer latency and the sin/cos pipeline."""
