import logging
import os

import numpy as np
import pytest

from core.algebra import FiniteQualgebra, builtin_structure, list_builtin_structures
from core.classify import enumerate_qualgebras
from core.cohomology import CocyclePair, coboundary, second_cohomology
from core.diagram import builtin_diagram, list_builtin_diagrams, move_fixture
from core.exceptions import KindMismatch, NonBijectiveTranslation, QualgebraLabError, TableShapeError
from utils import excel_utils, io_utils
from utils.config_manager import get_setting, init_config_manager, save_settings, set_setting
from utils.config_manager.config_manager import ConfigManager
from utils.log_utils import KEEP_LOG_FILES, LOG_NAME, setup_logging


@pytest.fixture
def manager(isolated_config):
    return ConfigManager(str(isolated_config / "presets"))


@pytest.fixture
def clean_logging():
    yield
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()


# --- настройки ---

def test_default_settings(manager):
    assert manager.get_setting("classify.max_size") == 5
    assert manager.get_setting("output.format") == "json"
    assert manager.get_setting("classify.missing", 7) == 7
    assert manager.get_setting("output.format.deeper") is None


def test_presets_round_trip(manager):
    manager.set_setting("freeqa.depth", 9)
    manager.set_setting("extra.nested.value", "x")
    assert manager.save_settings("deep")
    manager.reset_settings()
    assert manager.get_setting("freeqa.depth") == 6

    assert manager.load_settings("deep")
    assert manager.get_setting("freeqa.depth") == 9
    assert manager.get_setting("extra.nested.value") == "x"
    assert manager.get_setting("classify.max_size") == 5
    assert manager.get_presets_list() == ["deep"]

    assert manager.delete_preset("deep")
    assert not manager.delete_preset("deep")
    assert not manager.load_settings("deep")


def test_broken_preset_is_ignored(manager, isolated_config):
    (isolated_config / "presets" / "settings.json").write_text("{broken", encoding="utf-8")
    assert not manager.load_settings()
    assert manager.get_setting("output.indent") == 2


def test_env_overrides(manager, monkeypatch):
    monkeypatch.setenv("QUALGEBRA_LAB_BUDGET", "2.5")
    monkeypatch.setenv("QUALGEBRA_LAB_LOG_LEVEL", "debug")
    applied = manager.apply_env_overrides(os.devnull)
    assert set(applied) == {"classify.budget_seconds", "logging.level"}
    assert manager.get_setting("classify.budget_seconds") == 2.5
    assert manager.get_setting("logging.level") == "DEBUG"


def test_invalid_env_value_is_skipped(manager, monkeypatch):
    monkeypatch.setenv("QUALGEBRA_LAB_BUDGET", "soon")
    assert manager.apply_env_overrides(os.devnull) == []
    assert manager.get_setting("classify.budget_seconds") == 60


def test_dotenv_file(manager, isolated_config, monkeypatch):
    # load_dotenv пишет в os.environ: регистрируем переменную, чтобы monkeypatch удалил ее после теста
    monkeypatch.setenv("QUALGEBRA_LAB_LOG_LEVEL", "")
    monkeypatch.delenv("QUALGEBRA_LAB_LOG_LEVEL")
    dotenv = isolated_config / ".env"
    dotenv.write_text("QUALGEBRA_LAB_LOG_LEVEL=warning\n", encoding="utf-8")
    assert manager.apply_env_overrides(str(dotenv)) == ["logging.level"]
    assert manager.get_setting("logging.level") == "WARNING"


def test_global_manager(isolated_config):
    presets = str(isolated_config / "presets")
    init_config_manager(presets, use_env=False)
    set_setting("fuzz.steps", 11)
    assert save_settings()
    init_config_manager(presets, use_env=False)
    assert get_setting("fuzz.steps") == 11


# --- логирование ---

def test_log_rotation(isolated_config, clean_logging):
    log_dir = str(isolated_config / "logs")
    for _ in range(KEEP_LOG_FILES + 3):
        log_file = setup_logging(log_dir, "WARNING")
        logging.getLogger("qualgebra_lab.test").info("запись")
    assert os.path.basename(log_file) == f"{LOG_NAME}.log"
    archived = [f for f in os.listdir(log_dir) if f.startswith(f"{LOG_NAME}_")]
    assert len(archived) == KEEP_LOG_FILES
    with open(log_file, encoding="utf-8") as f:
        assert "запись" in f.read()


# --- Excel ---

def test_export_structure(isolated_config, p_qualgebra):
    path = str(isolated_config / "p.xlsx")
    assert excel_utils.export_structure(p_qualgebra, path, title="P")
    rows = excel_utils.read_sheet_values(path)
    assert rows[0] == ["⊲", "p", "q", "r", "s"]
    assert rows[1] == ["p", "p", "p", "q", "p"]
    assert any(row[0] == "◇" for row in rows)


def test_export_squandle_lists_squares(isolated_config):
    sq = builtin_structure("SQ4_q2-s")
    path = str(isolated_config / "sq.xlsx")
    assert excel_utils.export_structure(sq, path)
    rows = excel_utils.read_sheet_values(path)
    assert ["x", "x²"] == rows[-5][:2]
    assert [row[1] for row in rows[-4:]] == [sq.carrier.name(sq.sq(a)) for a in range(4)]


def test_export_cohomology(isolated_config, p_qualgebra):
    result = second_cohomology(p_qualgebra)
    path = str(isolated_config / "h2.xlsx")
    assert excel_utils.export_cohomology(p_qualgebra, result, path, label="P")
    summary = excel_utils.read_sheet_values(path, "cohomology")
    header = summary[0]
    assert summary[1][header.index("H2")] == "Z/2 ⊕ Z^4"
    assert summary[1][header.index("coefficients")] == "Z"

    representatives = excel_utils.read_sheet_values(path, "representatives")
    assert representatives[0][:2] == ["order", "chi(p,p)"]
    assert len(representatives) == 6
    assert sorted(row[0] for row in representatives[1:]) == [0, 0, 0, 0, 2]


def test_export_classification(isolated_config):
    result = enumerate_qualgebras(2)
    path = str(isolated_config / "cls.xlsx")
    assert excel_utils.export_classification(result, path)
    summary = excel_utils.read_sheet_values(path, "summary")
    assert "commutative" in summary[0]
    assert len(summary) == len(result.representatives) + 1

    empty = enumerate_qualgebras(3, nontrivial_only=True)
    assert excel_utils.export_classification(empty, path)
    assert excel_utils.read_sheet_values(path, "summary")[0][0].startswith("Нет структур")


# --- JSON ---

@pytest.mark.parametrize("name", list_builtin_structures())
def test_structure_json_round_trip(name):
    s = builtin_structure(name)
    loaded = io_utils.structure_from_dict(io_utils.structure_to_dict(s))
    assert loaded.kind == s.kind
    assert loaded.carrier.names == s.carrier.names
    assert np.array_equal(loaded.lhd, s.lhd)
    if isinstance(s, FiniteQualgebra):
        assert np.array_equal(loaded.diamond, s.diamond)


def test_group_structure_from_json():
    qa = io_utils.structure_from_dict({"kind": "group", "mul": [[0, 1], [1, 0]], "unit": 0, "inv": [0, 1]})
    assert isinstance(qa, FiniteQualgebra)
    assert qa.mul(1, 1) == 0
    assert qa.is_trivial()


def test_structure_json_errors():
    with pytest.raises(TableShapeError):
        io_utils.structure_from_dict({"kind": "qualgebra", "lhd": [[0, 0], [1, 1]]})
    with pytest.raises(KindMismatch):
        io_utils.structure_from_dict({"kind": "magma", "lhd": [[0, 0], [1, 1]]})
    with pytest.raises(NonBijectiveTranslation):
        io_utils.structure_from_dict({"kind": "quandle", "lhd": [[0, 0], [0, 1]]})
    assert issubclass(NonBijectiveTranslation, QualgebraLabError)


@pytest.mark.parametrize("name", list_builtin_diagrams())
def test_diagram_json_round_trip(name):
    d = builtin_diagram(name)
    assert io_utils.diagram_from_dict(io_utils.diagram_to_dict(d)) == d


def test_tangle_json_round_trip(isolated_config):
    tangle = move_fixture("R4z").lhs
    path = io_utils.save_diagram(tangle, str(isolated_config / "tangles" / "r4.json"))
    assert io_utils.resolve_diagram(path) == tangle
    assert io_utils.resolve_diagram("builtin:trefoil") == builtin_diagram("trefoil")


def test_bad_crossing_sign():
    with pytest.raises(ValueError):
        io_utils.diagram_from_dict({"arcs": ["a"], "crossings": [{"sign": "?", "over": "a", "under_in": "a",
                                                                   "under_out": "a"}]})


def test_cocycle_json(isolated_config, p_qualgebra):
    c = coboundary(p_qualgebra, [1, -2, 0, 3])
    path = io_utils.save_cocycle(c, str(isolated_config / "c.json"))
    assert io_utils.load_cocycle(path) == c

    assert io_utils.cocycle_from_dict({"chi": [[0, 1], [1, 0]]}).kind == "quandle"
    assert io_utils.cocycle_from_dict({"chi": [[0, 1], [1, 0]], "lambda": [1, 0]}).kind == "squandle"
    assert io_utils.cocycle_from_dict({"chi": [[0]], "lambda": [[0]]}) == CocyclePair("qualgebra", [[0]], [[0]])
    with pytest.raises(TableShapeError):
        io_utils.cocycle_from_dict({"lambda": [[0]]})


def test_load_json_errors(isolated_config):
    with pytest.raises(FileNotFoundError):
        io_utils.load_json(str(isolated_config / "missing.json"))
    broken = isolated_config / "broken.json"
    broken.write_text("[1, 2", encoding="utf-8")
    with pytest.raises(ValueError):
        io_utils.load_json(str(broken))


def test_dumps_numpy_values():
    text = io_utils.dumps({"n": np.int64(3), "rows": np.arange(2), "ok": np.bool_(True), "name": "⊲"}, indent=None)
    assert text == '{"n": 3, "rows": [0, 1], "ok": true, "name": "⊲"}'
