import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finsler_lie import algebra as A
from finsler_lie import io as fio
from finsler_lie import norm as N
from finsler_lie.errors import InputError, ParameterError


def _write(tmp_path, obj, name="x.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


@pytest.mark.parametrize("alg", [A.ch2(1, 1), A.ch2(0.4, 2.2), A.complex_heisenberg(), A.abelian(3)],
                         ids=lambda a: a.name)
def test_complex_roundtrip(tmp_path, alg):
    path = _write(tmp_path, fio.complex_algebra_to_json(alg))
    back, src = fio.load_complex_algebra(path)
    assert np.array_equal(back.structure_tensor, alg.structure_tensor)
    assert len(src.sha256) == 64


def test_spec_style_entry(tmp_path):
    d = {"n": 2, "lambda_hol": [{"i": 2, "j": 1, "k": 2, "re": 0.35355339, "im": 0}]}
    alg, _ = fio.load_complex_algebra(_write(tmp_path, d))
    assert alg.hol[1, 0, 1] == pytest.approx(0.35355339)
    assert alg.hol[1, 1, 0] == pytest.approx(-0.35355339)


def test_hol_entries_need_j_less_than_k(tmp_path):
    d = {"n": 2, "lambda_hol": [{"i": 2, "j": 2, "k": 1, "re": 1, "im": 0}]}
    with pytest.raises(InputError) as exc:
        fio.load_complex_algebra(_write(tmp_path, d))
    assert exc.value.position == "$.lambda_hol[0]"


@pytest.mark.parametrize(
    "doc,where",
    [
        ({"n": 2, "lambda_hol": [{"i": 3, "j": 1, "k": 2, "re": 1}]}, "$.lambda_hol[0]"),
        ({"n": 2, "lambda_mixed_hol": [{"i": 1, "j": 1, "k": 1, "re": "a"}]}, "$.lambda_mixed_hol[0]"),
        ({"n": "two"}, "$.n"),
        ({"dim": 2, "c": [{"k": 1, "i": 1, "j": 2}]}, "$.c[0]"),
        ({"dim": 2, "c": [], "I": [[0, 1]]}, "$.I"),
    ],
)
def test_schema_errors_have_positions(tmp_path, doc, where):
    with pytest.raises(InputError) as exc:
        fio.load_algebra(_write(tmp_path, doc))
    assert exc.value.position == where


def test_json_syntax_error_position(tmp_path):
    with pytest.raises(InputError) as exc:
        fio.load_algebra(_write(tmp_path, '{"n": 2,\n  oops}'))
    assert exc.value.position == (2, 3)
    assert "line 2" in str(exc.value)


def test_missing_file():
    with pytest.raises(InputError):
        fio.load_algebra("/nonexistent/alg.json")


def test_real_roundtrip(tmp_path):
    alg, I, kw = A.ch2_real(1.5, 0.5)
    path = _write(tmp_path, fio.real_algebra_to_json(alg, I, **kw))
    real, _ = fio.load_real_algebra(path)
    assert np.array_equal(real.algebra.c, alg.c)
    assert np.array_equal(real.I, I)
    assert real.basis == kw["basis"]
    assert np.allclose(real.weights, kw["weights"])


def test_report_wrapper_accepted(tmp_path):
    alg = A.ch2(1, 1)
    path = _write(tmp_path, {"command": "complexify", "result": {"algebra": fio.complex_algebra_to_json(alg)}})
    back, _ = fio.load_complex_algebra(path)
    assert np.array_equal(back.structure_tensor, alg.structure_tensor)


def test_builtin_paths():
    alg, src = fio.load_complex_algebra("builtin:ch2?beta=2&gamma=0.5")
    assert np.array_equal(alg.structure_tensor, A.ch2(2, 0.5).structure_tensor)
    assert src.is_builtin
    assert fio.load_complex_algebra("builtin:abelian?n=4")[0].n == 4
    nm, _ = fio.load_norm("builtin:perturbed?epsilon=0.2&p=3", 2)
    assert (nm.epsilon, nm.p) == (0.2, 3)
    with pytest.raises(ParameterError):
        fio.load_complex_algebra("builtin:ch2?gamma=-1")
    with pytest.raises(ParameterError):
        fio.load_complex_algebra("builtin:abelian?n=2.5")
    with pytest.raises(InputError):
        fio.load_complex_algebra("builtin:ch2?beta=x")


def test_norm_formats(tmp_path):
    h = [[{"re": 2, "im": 0}, {"re": 0, "im": 0.5}], [{"re": 0, "im": -0.5}, {"re": 1, "im": 0}]]
    nm, _ = fio.load_norm(_write(tmp_path, {"kind": "hermitian", "h": h}), 2)
    assert np.allclose(nm.h, [[2, 0.5j], [-0.5j, 1]])
    nm, _ = fio.load_norm(_write(tmp_path, {"kind": "perturbed_hermitian", "h": h, "epsilon": 0.05, "p": 2}), 2)
    assert isinstance(nm, N.PerturbedHermitianNorm)
    back = fio.norm_to_json(nm)
    assert back["epsilon"] == 0.05 and back["h"][0][1] == {"re": 0.0, "im": 0.5}


def test_norm_errors(tmp_path):
    asym = [[1, 0.5], [0, 1]]
    with pytest.raises(InputError, match="not Hermitian"):
        fio.load_norm(_write(tmp_path, {"kind": "hermitian", "h": asym}), 2)
    with pytest.raises(InputError, match="does not match"):
        fio.load_norm(_write(tmp_path, {"kind": "hermitian", "h": [[1]]}), 2)
    with pytest.raises(InputError, match="unknown norm kind"):
        fio.load_norm(_write(tmp_path, {"kind": "randers", "h": [[1]]}), 1)


def test_parse_vector():
    assert np.array_equal(fio.parse_vector("1:0,0:0"), [1, 0])
    assert np.array_equal(fio.parse_vector("1,0"), [1, 0])
    assert np.array_equal(fio.parse_vector("0.5:-1, 2"), [0.5 - 1j, 2])
    with pytest.raises(InputError) as exc:
        fio.parse_vector("1,a:b")
    assert exc.value.position == 2
    with pytest.raises(InputError):
        fio.parse_vector("1,0", n=3)
    with pytest.raises(InputError):
        fio.parse_vector("nan,0")


def test_parse_grid():
    grid = fio.parse_grid(["beta=0.5,1,2", "gamma=1;epsilon=0,0.1"])
    assert grid == [("beta", [0.5, 1.0, 2.0]), ("gamma", [1.0]), ("epsilon", [0.0, 0.1])]
    for bad in (["beta"], ["beta="], ["beta=1", "beta=2"], [""]):
        with pytest.raises(InputError):
            fio.parse_grid(bad)


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e300))
def test_complex_serialization_lossless(z):
    assert fio.parse_complex(json.loads(json.dumps(fio.cjson(z))), "z") == z
