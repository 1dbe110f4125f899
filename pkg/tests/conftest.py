import re

import pytest

from chromatic_tiling import PRESETS, PartitionGraph

_CRITERIA: dict[int, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _CRITERIA.setdefault(marker.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status = "PASS" if all(_CRITERIA[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status} "
                                    f"({sum(_CRITERIA[n])}/{len(_CRITERIA[n])} checks)")


@pytest.fixture
def carpet():
    return PRESETS["sierpinski-carpet"]


@pytest.fixture
def dust():
    return PRESETS["cantor-dust"]


@pytest.fixture
def full_square():
    return PRESETS["full-square"]


def cycle(n):
    return PartitionGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return PartitionGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return PartitionGraph.from_edges(10, outer + spokes + inner)


def grotzsch():
    # Mycielskian of C5: triangle-free, chromatic number 4
    c5 = [(i, (i + 1) % 5) for i in range(5)]
    edges = list(c5)
    for u, v in c5:
        edges += [(u, v + 5), (v, u + 5)]
    edges += [(i + 5, 10) for i in range(5)]
    return PartitionGraph.from_edges(11, edges)


def wheel(n):
    rim = [(i, (i + 1) % n) for i in range(n)]
    return PartitionGraph.from_edges(n + 1, rim + [(i, n) for i in range(n)])


SYNTHETIC = {
    "C5": cycle(5), "C8": cycle(8), "C9": cycle(9), "K1": complete(1),
    "K4": complete(4), "K6": complete(6), "petersen": petersen(),
    "grotzsch": grotzsch(), "W5": wheel(5), "W6": wheel(6),
    "empty7": PartitionGraph.from_edges(7, []),
}


def criterion(name):
    m = re.match(r"test_c(\d+)_", name)
    return int(m.group(1)) if m else None
