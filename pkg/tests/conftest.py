import sys

from hypothesis import HealthCheck, settings, strategies as st

from partcalc.partition import Partition

settings.register_profile(
    "default", deadline=None, derandomize=True, max_examples=150, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def partitions(draw, max_k: int = 3, max_l: int = 3, min_k: int = 0, min_l: int = 0):
    k = draw(st.integers(min_k, max_k))
    l = draw(st.integers(min_l, max_l))
    n = k + l
    labels = draw(st.lists(st.integers(0, max(n - 1, 0)), min_size=n, max_size=n))
    return Partition.from_labels(k, l, labels)


def lower_partitions(max_l: int = 6, min_l: int = 1):
    return partitions(max_k=0, max_l=max_l, min_l=min_l)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, after the normal report."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if results[n] else 'FAIL'}")
