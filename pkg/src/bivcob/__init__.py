"""Bivariant versions of algebraic cobordism over finite geometric sites."""
