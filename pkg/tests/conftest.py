import pytest

# acceptance results, printed as one line each at the end of the session
ACCEPTANCE = {}


def record(index, title, passed, detail=""):
    ACCEPTANCE[index] = (title, bool(passed), detail)
    print(f"[acceptance {index:2d}] {'PASS' if passed else 'FAIL'}  {title}  {detail}")


@pytest.fixture
def acceptance_record():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for index in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[index]
        terminalreporter.write_line(f"{index:2d}  {'PASS' if passed else 'FAIL'}  {title}  {detail}")
