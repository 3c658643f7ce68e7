import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatter_jk.cli import main
from scatter_jk.diagram import kronecker_diagram
from scatter_jk.formats import ConfigError, deserialize, parse_config_text, s2q, serialize
from scatter_jk.oracle import complete_inductive
from scatter_jk.unfolding import pick_parameters, unfold

BASE = """[lattice]
kappa = 1
cone = 1,0 ; 0,1
degree = 1,1

[run]
order = 3

[wall x]
direction = 1,0
support = line
base = 0,0
generator = dilog
"""


@pytest.mark.parametrize(
    "D",
    [
        kronecker_diagram(1, 3),
        complete_inductive(kronecker_diagram(2, 4), 4),
        unfold(kronecker_diagram(1, 3), pick_parameters(kronecker_diagram(1, 3), 3, 0)),
    ],
)
def test_round_trip(D):
    assert deserialize(serialize(D)) == D
    assert serialize(deserialize(serialize(D))) == serialize(D)


@settings(max_examples=25, deadline=None)
@given(st.fractions(-20, 20, max_denominator=50))
def test_rationals_round_trip(q):
    from scatter_jk.formats import q2s

    assert s2q(q2s(q)) == q


def test_config_parses():
    lat, D, opts = parse_config_text(BASE)
    assert lat.kappa == 1 and opts.order == 3 and opts.seed == 0
    assert len(D.walls) == 1 and D.walls[0].generator.coeff((2, 0)) == Fraction(1, 4)


def test_missing_order_names_the_field():
    text = BASE.replace("order = 3\n", "")
    with pytest.raises(ConfigError) as err:
        parse_config_text(text)
    assert err.value.field == "run.order"
    assert err.value.line is not None


def test_off_ray_coefficient_is_rejected():
    text = BASE.replace("generator = dilog", "generator = 1,0: -1 ; 1,1: 2")
    with pytest.raises(ConfigError) as err:
        parse_config_text(text)
    assert err.value.line == text.splitlines().index("generator = 1,0: -1 ; 1,1: 2") + 1


def test_explicit_generator():
    _, D, _ = parse_config_text(BASE.replace("generator = dilog", "generator = 1,0: -1 ; 2,0: 1/4"))
    assert D.walls[0].generator.terms == {(1, 0): -1, (2, 0): Fraction(1, 4)}


def _run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_complete_both_and_deterministic(capsys):
    code, out1, _ = _run(capsys, ["complete", "--method", "both", "--order", "3"])
    assert code == 0
    assert json.loads(out1)["equivalence"] == "equal"
    _, out2, _ = _run(capsys, ["complete", "--method", "both", "--order", "3"])
    assert out1 == out2


def test_check_reports_consistency(capsys):
    code, out, _ = _run(capsys, ["check", "--order", "3"])
    rec = json.loads(out)
    assert code == 0 and rec["consistent"] and rec["completed_defect"] == []


def test_jk_residue_command(capsys, tmp_path):
    arr = tmp_path / "a.json"
    fun = tmp_path / "f.json"
    arr.write_text(json.dumps({"variables": ["s1"], "hyperplanes": [{"linear": ["4"], "constant": "-6"}]}))
    fun.write_text(json.dumps({"prefactor": "1", "denominators": [[0, 1]]}))
    code, out, _ = _run(capsys, ["jk-residue", "--arrangement", str(arr), "--function", str(fun)])
    assert code == 0
    assert json.loads(out)["value"] == {"q": "1/4", "d": 1}


def test_render_draws_rays(capsys, tmp_path):
    svg = tmp_path / "d.svg"
    code, out, _ = _run(capsys, ["render", "--order", "3", "--out", str(svg)])
    assert code == 0
    assert svg.read_text().count('class="ray"') >= 3


def test_theta_command(capsys):
    code, out, _ = _run(capsys, ["theta", "--order", "2", "--Q=-3,-7/2", "--m", "1,0"])
    assert code == 0
    assert json.loads(out)["equivalence"] == "equal"


def test_error_exit_code(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(BASE.replace("order = 3\n", ""))
    code, _, err = _run(capsys, ["check", "--config", str(cfg)])
    rec = json.loads(err)
    assert code == 2 and rec["field"] == "run.order"
