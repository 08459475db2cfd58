from __future__ import annotations

import functools
from fractions import Fraction

from hypothesis import settings

from hplab.hp import solve_power_system
from hplab.semiclassical import two_point

settings.register_profile("hplab", max_examples=40, deadline=None)
settings.load_profile("hplab")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def hp_sol(alpha: Fraction, s: int, n: int):
    """Exact type I solution for f(z; alpha), shared across test modules."""
    return solve_power_system(two_point(alpha), s, n)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
