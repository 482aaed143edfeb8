import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--nightly", action="store_true", default=False,
                     help="run the long scenario checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--nightly"):
        return
    skip = pytest.mark.skip(reason="nightly tier; pass --nightly to run")
    for item in items:
        if "nightly" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance bookkeeping: parts recorded as "C<n>.<part>", summarised one line per criterion
_CRITERIA: dict[str, list[tuple[str, bool, str]]] = {}
_CRITERION_TITLES = {
    "C1": "time-step convergence table",
    "C2": "invariant conservation",
    "C3": "linear-mode oracle",
    "C4": "profile solver",
    "C5": "traveling-wave fidelity",
    "C6": "decay law",
    "C7": "dispersion identities",
    "C8": "collision scenario (nightly)",
    "C9": "noise construction",
}


@pytest.fixture
def criterion():
    """``criterion("C4.a", ok, detail)`` records a part and returns ``ok``."""

    def record(key: str, ok: bool, detail: str = "") -> bool:
        name, _, part = key.partition(".")
        _CRITERIA.setdefault(name, []).append((part, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    collected = [i for i in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])
                 + terminalreporter.stats.get("skipped", []) if "test_acceptance" in i.nodeid]
    if not collected and not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, title in _CRITERION_TITLES.items():
        parts = _CRITERIA.get(name)
        if not parts:
            terminalreporter.write_line(f"{name} SKIP  {title}: not run")
            continue
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{p or 'all'} {'ok' if ok else 'FAILED'} {d}".strip() for p, ok, d in parts)
        terminalreporter.write_line(f"{name} {status}  {title}: {detail}")
