def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, _, _ in CRITERIA:
        if num in RESULTS:
            terminalreporter.write_line(RESULTS[num])
