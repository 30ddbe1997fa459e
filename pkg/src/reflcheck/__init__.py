"""Exact verification engine for the reflection-equation algebra and its
difference-operator realizations acting on 3F2(1)."""

__version__ = "0.1.0"
