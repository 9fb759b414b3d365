import sys
from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from lpsampling.graph import Graph, generate_synthetic, giant_component  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def small_graphs(draw, min_nodes=2, max_nodes=9):
    """Random simple graphs as ``(n, sorted edge list)``."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return n, [p for p, keep in zip(pairs, mask) if keep]


@st.composite
def connected_graphs(draw, min_nodes=3, max_nodes=12):
    """Connected graphs: a random spanning tree plus random extra edges."""
    n = draw(st.integers(min_nodes, max_nodes))
    edges = set()
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.add((u, v))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges |= {p for p, keep in zip(pairs, mask) if keep}
    return Graph(n, sorted(edges))


@pytest.fixture(scope="session")
def clustered():
    """Clustered preferential-attachment graph with triadic closure."""
    return generate_synthetic("preferential-attachment", n=1000, m=3, triad_p=0.9, seed=7)


@pytest.fixture(scope="session")
def pa500():
    return generate_synthetic("preferential-attachment", n=500, m=3, seed=11)


@pytest.fixture
def k4():
    return generate_synthetic("complete", n=4)


@pytest.fixture
def ru_gcc():
    return giant_component(generate_synthetic("random-uniform", n=500, m=1500, seed=5))


# --- acceptance summary --------------------------------------------------------

_CRITERIA: list[tuple[str, str, str, str]] = []


@pytest.fixture
def detail(request):
    """Attach a one-line result description to an acceptance test."""
    def put(text):
        request.node.user_properties.append(("detail", text))
    return put


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
        text = "; ".join(v for k, v in item.user_properties if k == "detail")
        if rep.skipped and not text:
            text = str(rep.longrepr[2]) if isinstance(rep.longrepr, tuple) else ""
        _CRITERIA.append((mark.args[0], mark.args[1], status, text))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, status, text in sorted(_CRITERIA, key=lambda r: r[0]):
        line = f"[{status}] {cid} {title}"
        terminalreporter.write_line(f"{line}: {text}" if text else line)
