import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from kappax import fixtures
from kappax.data import ClassificationTensor


@pytest.fixture(scope="session")
def exam():
    return fixtures.exam_tensor()


@pytest.fixture(scope="session")
def exam_rules():
    return fixtures.exam_rules()


@pytest.fixture(scope="session")
def exam_weights():
    return fixtures.exam_weights()


@pytest.fixture(scope="session")
def dsm():
    return fixtures.dsm_tensor()


@st.composite
def tensors(draw, max_subjects=8, max_raters=5, max_categories=5, full=False):
    """Random multi-label tensors; participation is random unless ``full``."""
    I = draw(st.integers(1, max_subjects))
    J = draw(st.integers(2, max_raters))
    C = draw(st.integers(1, max_categories))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    part = np.ones((I, J), bool) if full else rng.random((I, J)) < 0.8
    sel = (rng.random((I, J, C)) < draw(st.floats(0.1, 0.9))) & part[:, :, None]
    return ClassificationTensor.from_arrays(sel, part)


@st.composite
def exclusive_tables(draw, max_subjects=20, max_raters=6, max_categories=8):
    """Mutually exclusive data: every rater picks exactly one category per subject."""
    I = draw(st.integers(1, max_subjects))
    J = draw(st.integers(2, max_raters))
    C = draw(st.integers(2, max_categories))
    seed = draw(st.integers(0, 2**32 - 1))
    choice = np.random.default_rng(seed).integers(0, C, size=(I, J))
    sel = np.zeros((I, J, C), bool)
    np.put_along_axis(sel, choice[:, :, None], True, axis=2)
    return ClassificationTensor.from_arrays(sel)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[number][1])
