"""Finite-group engine for counting homomorphisms and crossed homomorphisms."""
from ._backend import BACKEND
