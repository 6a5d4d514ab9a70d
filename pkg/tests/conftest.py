import pytest

from compindex.synth import SynthParams, generate

_ACCEPTANCE = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when == "teardown":
        return
    if call.when == "setup" and call.excinfo is None:
        return
    number, text = marker.args
    passed = call.when == "call" and call.excinfo is None
    prev = _ACCEPTANCE.get(number)
    _ACCEPTANCE[number] = (text, passed and (prev is None or prev[1]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        text, passed = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {text}")


@pytest.fixture(scope="session")
def synth_result():
    return generate(SynthParams(seed=11))


@pytest.fixture(scope="session")
def synth_dataset(synth_result):
    return synth_result.dataset
