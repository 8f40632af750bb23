"""
Shared fixtures for the test suite.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from src.simulation.store import pack, random_files


@pytest.fixture
def make_store():
    """Random payloads packed for a given scheme."""

    def _make(scheme, payload_bytes=16, seed=7):
        return pack(random_files(scheme.N, payload_bytes, seed), scheme.F)

    return _make


@pytest.fixture
def golden_store():
    """Three one-block files: 01 02 03 / 10 20 30 / a0 b0 c0."""
    return pack([bytes([0x01, 0x02, 0x03]), bytes([0x10, 0x20, 0x30]), bytes([0xA0, 0xB0, 0xC0])], 3)


@pytest.fixture
def golden_transcript():
    """Hand-computed log for mn K=3 N=3 t=1 over golden_store, demand 0,1,2."""
    return (
        "scheme=mn K=3 N=3 t=1 h=1 demand=0,1,2\n"
        "Y j=0 A=1,2 payload=12\n"
        "Y j=0 A=1,3 payload=a3\n"
        "Y j=0 A=2,3 payload=80\n"
    )
