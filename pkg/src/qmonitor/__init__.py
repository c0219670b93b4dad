"""Repeated finite-accuracy position measurements on 1-D oscillators."""
