import numpy as np
import pytest

from cardbin.regions import ConnectedComponent

_ACCEPTANCE = []


def rect_component(x, y, w, h, *, area=None, fill=40, g_min=30, g_max=200, label=0):
    """A component spanning the box ``(x, y, w, h)``.

    With ``area`` the rows below the first are shortened (the first row stays
    full width, every row keeps its first pixel) so the box is unchanged.
    """
    if area is None:
        runs = [(y + r, x, x + w) for r in range(h)]
    else:
        spare = area - w - (h - 1)
        if not 0 <= spare <= (w - 1) * (h - 1):
            raise ValueError("area not representable in this box")
        runs = [(y, x, x + w)]
        for r in range(1, h):
            extra = min(w - 1, spare)
            spare -= extra
            runs.append((y + r, x, x + 1 + extra))
    return ConnectedComponent(label=label, x=x, y=y, width=w, height=h,
                              area=sum(e - s for _, s, e in runs),
                              g_min=g_min, g_max=g_max, fill_ratio_pct=fill,
                              runs=np.array(runs, dtype=np.int64))


@pytest.fixture
def criterion():
    """Record one acceptance line and assert it."""

    def check(name, passed, detail=""):
        _ACCEPTANCE.append(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())
        assert passed, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
