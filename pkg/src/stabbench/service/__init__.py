"""FastAPI service wrapping the oracles, sessions and scoring."""
