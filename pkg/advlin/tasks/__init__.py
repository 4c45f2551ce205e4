"""Tasks package initialization."""
