"""Shared pytest plumbing: a visible pass/fail line per acceptance criterion."""


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(n, text): numbered acceptance check reported at session end",
    )
    config._criterion_lines = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            config._criterion_lines[item.nodeid] = (marker.args[0], marker.args[1])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    registry = getattr(config, "_criterion_lines", {})
    if not registry:
        return
    outcome = {}
    for word, categories in (
        ("PASS", ("passed",)),
        ("SKIP", ("skipped",)),
        ("FAIL", ("failed", "error")),
    ):
        for category in categories:
            for report in terminalreporter.stats.get(category, []):
                if report.nodeid in registry:
                    number, _ = registry[report.nodeid]
                    # a later, worse word overrides an earlier one
                    outcome[number] = word
    if not outcome:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, (number, text) in sorted(registry.items(), key=lambda kv: kv[1][0]):
        word = outcome.get(number)
        if word is not None:
            terminalreporter.write_line(f"{word} criterion {number}: {text}")
