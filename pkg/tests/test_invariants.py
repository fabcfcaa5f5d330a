import pytest

from greenkernels.invariants import GROUPS, annulus_dd_raw_limit, run_checks

CHECKS = run_checks(seed=0)


def test_battery_is_complete():
    kinds = {c.group for c in CHECKS}
    assert kinds >= {"symmetry", "boundary", "harmonicity", "far-field", "cross-oracle", "limit", "term-sum"}
    assert len({c.name for c in CHECKS}) == len(CHECKS)
    assert set(GROUPS) == {"model-kernels", "oracles", "formulas"}


@pytest.mark.parametrize("check", CHECKS, ids=[f"{c.group}:{c.name}" for c in CHECKS])
def test_invariant(check):
    assert check.passed, f"{check.name}: {check.value:.3e} > {check.tol:.1e}"


def test_uncorrected_annulus_limit_is_not_the_disk_kernel():
    # without the log-capacity correction the small-hole annulus kernel stays
    # O(1 / |log eps|) away from the disk kernel
    assert annulus_dd_raw_limit(tiny=1e-8) > 1e-3


def test_battery_deterministic():
    again = run_checks(seed=0, groups=["model-kernels"])
    assert [c.to_dict() for c in again] == [c.to_dict() for c in CHECKS[: len(again)]]
