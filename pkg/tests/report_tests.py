import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

# -------------------------------
# Locate modules
# -------------------------------
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = PROJECT_ROOT / "Scripts"
sys.path.insert(0, str(SCRIPTS_DIR))

from config import ToolkitConfig, config_to_dict, load_config
from errors import ConfigurationError, DomainError
from report import (
    CommandReport, canonical_json, format_complex, parse_complex, parse_complex_vector, parse_int_vector,
    parse_rational_vector, summarize, to_jsonable,
)


def test_rational_vectors():
    assert parse_rational_vector("1/2, 0") == (Fraction(1, 2), Fraction(0))
    assert parse_rational_vector("3 -2/3") == (Fraction(3), Fraction(-2, 3))
    assert parse_int_vector("1,-1") == (1, -1)
    with pytest.raises(DomainError):
        parse_int_vector("1/2")
    with pytest.raises(DomainError):
        parse_rational_vector("a,b")


def test_complex_strings():
    assert parse_complex("0.5+1.25i") == complex(0.5, 1.25)
    assert parse_complex("-i") == complex(0, -1)
    assert parse_complex("1e-3-2e+1i") == complex(0.001, -20)
    assert parse_complex("1/3-1/2i", exact=True) == sympy.Rational(1, 3) - sympy.I / 2
    assert parse_complex_vector("0.1, 0+1i") == (complex(0.1, 0), complex(0, 1))
    with pytest.raises(DomainError):
        parse_complex("one")
    assert format_complex(complex(1.5, -2.0)) == "1.5-2.0i"


def test_jsonable_values():
    assert to_jsonable({"x": Fraction(3, 4), "z": 1j, "s": {3, 1}}) == {"x": "3/4", "z": "0.0+1.0i", "s": [1, 3]}


def test_status_validation_and_exit_codes():
    with pytest.raises(ValueError):
        CommandReport(["x"], "maybe")
    assert CommandReport(["x"], "indeterminate").exit_code == 3
    assert CommandReport(["x"], "fail").exit_code == 1


def test_canonical_json_sorts_keys():
    text = canonical_json({"b": 1, "a": Fraction(1, 2)})
    assert text.index('"a"') < text.index('"b"')
    report = CommandReport(["weights", "enumerate"], "pass", {}, {"count": 3}).finalize()
    table = summarize(report, [["weight"], [[0]], [[1]]])
    assert "weights enumerate" in table and "count" in table


def test_config_defaults_and_overrides(tmp_path):
    cfg = ToolkitConfig()
    assert cfg.qorder == 40 and cfg.tolerance == 1e-8 and cfg.im_tau_floor == 0.5
    assert cfg.with_overrides(seed=9, log_file=None).seed == 9
    path = tmp_path / "cfg.yaml"
    path.write_text("qorder: 12\nsamples: 5\n", encoding="utf-8")
    loaded = load_config(str(path))
    assert config_to_dict(loaded)["qorder"] == 12 and loaded.samples == 5


def test_config_rejects_bad_values(tmp_path):
    with pytest.raises(ConfigurationError):
        ToolkitConfig(tolerance=0)
    with pytest.raises(ConfigurationError):
        ToolkitConfig(max_rank=5)
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / "missing.yaml"))
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(str(path))
