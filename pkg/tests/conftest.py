import contextlib

import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


class _Checks:
    def __init__(self):
        self.items = []

    def __call__(self, label, ok, detail=""):
        self.items.append((label, bool(ok), detail))

    @property
    def failed(self):
        return [(label, detail) for label, ok, detail in self.items if not ok]


@pytest.fixture
def criterion(request):
    """``with criterion(n, title) as check: check(label, ok, detail)``.

    Prints one PASS/FAIL line per criterion and fails the test if any check
    failed or the body raised.
    """
    lines = request.config.stash[_LINES]

    @contextlib.contextmanager
    def run(number, title):
        checks = _Checks()
        error = None
        try:
            yield checks
        except Exception as exc:  # recorded, then re-raised below
            error = exc
        ok = error is None and not checks.failed and checks.items
        detail = "; ".join(f"{label}: {d}" if d else label for label, _, d in checks.items)
        if error is not None:
            detail = f"{type(error).__name__}: {error}"
        line = f"criterion {number} {'PASS' if ok else 'FAIL'} - {title} [{detail}]"
        lines.append((number, line))
        print(line)
        if error is not None:
            raise error
        assert checks.items, "no checks recorded"
        assert not checks.failed, f"failed checks: {checks.failed}"

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
