import numpy as np
import pytest

from proxdec.ldpc import ParityCheckMatrix, hamming_7_4, make_regular_ldpc, repetition_2

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(label: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else "")
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def hamming() -> ParityCheckMatrix:
    return hamming_7_4()


@pytest.fixture
def rep2() -> ParityCheckMatrix:
    return repetition_2()


@pytest.fixture(scope="session")
def ldpc204() -> ParityCheckMatrix:
    return make_regular_ldpc(204, 3, 6, np.random.default_rng(1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def all_bipolar(n):
    """Every vector in {+1, -1}^n, one per row."""
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def brute_is_codeword(H: ParityCheckMatrix, x) -> bool:
    bits = (np.asarray(x) < 0).astype(int)
    return not ((H.dense.astype(int) @ bits) % 2).any()
