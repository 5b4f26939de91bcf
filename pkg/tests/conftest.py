from hypothesis import settings

# fixed example streams keep the run time of the exponential engines reproducible
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
