from functools import lru_cache

import numpy as np
import pytest
from sympy import jacobi_symbol

from halfint import make_field
from halfint.shimura import SqfreeSeed, lift_reconstruct, random_eigen

FIELDS = ["Q", "Q(sqrt{2})", "Q(sqrt{5})", "Q(sqrt{13})", "Q(sqrt{17})", "Q(sqrt{29})"]


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a fundamental discriminant D and n >= 1."""
    out = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        out *= 1 if D % 8 in (1, 7) else -1
    if n == 1:
        return out
    return out * jacobi_symbol(D % n, n)


@lru_cache(maxsize=None)
def synthetic(field: str, seed: int, B: int):
    """(table, eigen-system, seed) of a synthetic Ramanujan-bounded eigenform."""
    K = make_field(field)
    rng = np.random.default_rng(seed)
    sys_ = random_eigen(K, B, rng)
    sd = SqfreeSeed.random(K, B, rng)
    return lift_reconstruct(sd, sys_, B), sys_, sd


@pytest.fixture(scope="session")
def QQ():
    return make_field("Q")


@pytest.fixture(scope="session")
def K5():
    return make_field("Q(sqrt{5})")


@pytest.fixture(params=FIELDS)
def field(request):
    return make_field(request.param)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
