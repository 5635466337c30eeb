import hashlib
import json
import math
from fractions import Fraction

import pytest
import sympy

import killing_lab as kl


def diag(a, b, c):
    return [a, b, c] + [0.0] * 24


def test_catalog_lists_op2_and_hpm3():
    rows = {r["id"]: r for r in kl.catalog()}
    assert rows["op2"]["n"] == 16
    assert rows["hpm:3"]["n"] == 12
    assert "file:<path>" in rows


def test_series_constants_match_sympy_bernoulli():
    for m in range(6):
        b = sympy.bernoulli(2 * m)
        expected = (-1) ** (m + 1) * (2 * m - 1) * 2 ** (2 * m - 1) * b / sympy.factorial(2 * m)
        assert Fraction(kl.bernoulli_c(m)) == Fraction(str(expected))
    # sin^2(u)/u^2 and u cot u expanded in t = u^2
    t = sympy.symbols("t")
    u = sympy.sqrt(t)
    g = sympy.series(sympy.sin(u) ** 2 / t, t, 0, 4).removeO()
    o = sympy.series(u * sympy.cot(u), t, 0, 4).removeO()
    for m in range(3):
        assert Fraction(kl.metric_coeff(m)) == Fraction(str(g.coeff(t, m)))
        assert Fraction(kl.odd_field_coeff(m)) == Fraction(str(o.coeff(t, m)))


def test_albert_determinant_and_polarization():
    assert kl.albert_det(diag(1, 2, 3)) == 6
    assert kl.albert_det(diag(1, 0, 0)) == 0
    x = [0.3, -1.1, 0.7] + [math.sin(k + 1) for k in range(24)]
    assert kl.albert_phi(x, x, x) == pytest.approx(kl.albert_det(x), rel=1e-12, abs=1e-12)
    e = diag(1, 0, 0)
    assert kl.jordan_mul(e, e) == pytest.approx(e)
    assert len(kl.tangent_basis_at_E()) == 16


def test_content_hash_is_git_blob_sha1():
    data = '{"space":"op2"}'
    blob = b"blob %d\0" % len(data) + data.encode()
    assert kl.content_hash(data) == hashlib.sha1(blob).hexdigest()


def test_solve_cpm2_is_decomposable():
    rep = kl.solve("cpm:2")
    assert rep["schema"] == 1
    assert rep["solution_dim"] == rep["decomposable_dim"]
    assert rep["indecomposable_dim"] == 0


def test_cli_exit_codes_and_reproducible_reports():
    code, out1, _ = kl.run_cli(["solve", "--space", "sphere:3"])
    assert code == 0
    assert json.loads(out1)["indecomposable_dim"] == 0
    _, out2, _ = kl.run_cli(["solve", "--space", "sphere:3"])
    assert out1 == out2
    code, _, err = kl.run_cli(["solve", "--space", "nowhere:1"])
    assert code == 1 and "unknown space" in err
    code, _, _ = kl.run_cli(["solve", "--space", "cpm:2", "--rank", "0"])
    assert code == 1


def test_embedded_ka_is_conserved():
    a = [0.5, -0.2, -0.3] + [0.1 * (k % 5) for k in range(8)] + [0.0] * 16
    assert kl.embedded_geodesic_check(a, seed=3, steps=400) < 1e-8
