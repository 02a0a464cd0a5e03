import sys

import pytest


def nodes_to_depth(depth: int):
    """All tree nodes with depth <= ``depth``, by plain recursion on tuples."""
    level = [(1, 0, 0, 1)]
    out = list(level)
    for _ in range(depth):
        nxt = []
        for a, b, c, d in level:
            nxt.append((a, b, a + c, b + d))
            nxt.append((a + c, b + d, c, d))
        out.extend(nxt)
        level = nxt
    return out


@pytest.fixture(scope="session")
def depth10_nodes():
    return nodes_to_depth(10)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
