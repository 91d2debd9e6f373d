"""Shared fixtures: the expensive solves are session-scoped so the
acceptance module and the property tests reuse one sweep and one pair of
fine-grid eigenpairs."""

import pytest

import segpart as sp
from segpart.partition import PartitionProblem, run_sweep

SWEEP_R_VALUES = [1 / 8, 1 / 16, 1 / 32, 1 / 64, 0.0]


@pytest.fixture(scope="session")
def disk_eig_128():
    dom = sp.build_domain("disk", 128, 1.0)
    return dom, sp.first_dirichlet_eig(dom, tol=1e-9)


@pytest.fixture(scope="session")
def disk_eig_256():
    dom = sp.build_domain("disk", 256, 1.0)
    return dom, sp.first_dirichlet_eig(dom, tol=1e-9)


@pytest.fixture(scope="session")
def square_eig_128():
    dom = sp.build_domain("square", 128, 1.0)
    return dom, sp.first_dirichlet_eig(dom, tol=1e-9)


@pytest.fixture(scope="session")
def square_eig_256():
    dom = sp.build_domain("square", 256, 1.0)
    return dom, sp.first_dirichlet_eig(dom, tol=1e-9)


@pytest.fixture(scope="session")
def rect_sweep_128():
    """The separation sweep on rectangle(2,1) at n=128 behind criteria 5-7
    and 9; states are kept for reuse."""
    import time

    dom = sp.build_domain("rectangle", 128, 2.0, 1.0)
    prob = PartitionProblem(dom, k=2, r=max(SWEEP_R_VALUES), seed=11, tol_eig=1e-8)
    t0 = time.perf_counter()
    report = run_sweep(prob, SWEEP_R_VALUES)
    report.metadata["wall_time"] = time.perf_counter() - t0
    return dom, prob, report
