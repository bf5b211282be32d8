import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from homlab import constructions as cons  # noqa: E402
from homlab.space import discrete_space  # noqa: E402
from homlab.structure import NormTable  # noqa: E402

# the 8-point table whose norm is not monotone in any basis (bit 0 = e0)
NONMONOTONE_NORM = (0, 10, 11, 14, 12, 16, 15, 13)


def corpus():
    """Named spaces from every constructor, all 1-homogeneous except the hexagon."""
    out = {}
    for n in range(1, 11):
        out[f"cycle{n}"] = cons.cycle(n)
    for m in range(0, 5):
        out[f"binary{m}"] = cons.binary_space(m)
    for n in range(1, 7):
        out[f"discrete{n}"] = discrete_space(n)
    for m, k in [(0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (3, 0)]:
        out[f"b{m}{k}"] = cons.b_space(m, k)
    for n in range(1, 8):
        out[f"d{n}"] = cons.d_space(n)
    for m, k in [(0, 1), (1, 1), (0, 2)]:
        out[f"e{m}{k}"] = cons.e_space(m, k)
    for n in range(0, 4):
        out[f"dbool{n}"] = cons.discrete_boolean_duplicate(n)
    out["tetra"] = cons.tetrahedron(1.0, 1.1, 1.2)
    out["nonmonotone"] = cons.boolean_space(NormTable(3, NONMONOTONE_NORM))
    out["c3xc4"] = cons.l1_product(cons.scale(cons.cycle(3), 10), cons.cycle(4))
    return out


_CORPUS = None


def get_corpus():
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = corpus()
    return _CORPUS


@pytest.fixture(scope="session")
def spaces():
    return get_corpus()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
