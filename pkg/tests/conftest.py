import numpy as np
import pytest

from core.algebra import builtin_structure, list_builtin_structures
from core.diagram import builtin_diagram

P_NAMES = [f"P_qs-{a}_qq-{b}" for a in "pqs" for b in "pqs"]
SQ4_NAMES = ["SQ4_s3sq", "SQ4_q2-p", "SQ4_q2-q", "SQ4_q2-s"]
SMALL_STRUCTURES = [name for name in list_builtin_structures() if name not in ("S4", "S4_sq", "S4_3cycles")]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def p_qualgebra():
    return builtin_structure("P_qs-q_qq-s")


@pytest.fixture
def cuff_st():
    return builtin_diagram("cuff_st")


@pytest.fixture
def isolated_config(tmp_path, monkeypatch):
    """Рабочая папка и окружение без пользовательских настроек."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("QUALGEBRA_LAB_BUDGET", raising=False)
    monkeypatch.delenv("QUALGEBRA_LAB_LOG_LEVEL", raising=False)
    return tmp_path
