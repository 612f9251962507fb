import numpy as np
import pytest

from dualmark import codec
from dualmark.kernels import _pykernels
from dualmark.synth import synthetic_speech

try:
    from dualmark.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

WM_DCT = "Jerrin Thomas Panachakel"
WM_DWT = "College of Engineering, Trivandrum, India"
ALPHA = 0.05

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def speech():
    return synthetic_speech(10.0, sample_rate=8000, seed=2024)


@pytest.fixture(scope="session")
def paper_embed(speech):
    """Paper configuration on the speech fixture: (watermarked, keyfile)."""
    return codec.embed_multilevel(speech, WM_DWT, WM_DCT, ALPHA)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion id -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {cid}: {detail}")
