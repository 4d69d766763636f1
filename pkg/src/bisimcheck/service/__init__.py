"""HTTP service wrapping the core verdict operations."""
