import pytest

_criteria = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_criteria] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(item.user_properties).get("detail", "")
        status = "PASS" if rep.passed else "FAIL"
        item.config.stash[_criteria][number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_criteria]
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        title, status, detail = results[number]
        line = f"{status} criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
