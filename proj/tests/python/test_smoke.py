import cmath
import json
import math
import random

import pytest

import sparsetrig as st


def real_poly(seed, n=4):
    rng = random.Random(seed)
    terms = [((0,), rng.gauss(0, 1))]
    for k in range(1, n + 1):
        c = complex(rng.gauss(0, 1), rng.gauss(0, 1))
        terms += [((k,), c), ((-k,), c.conjugate())]
    return st.TrigPolynomial(1, [(list(k), c) for k, c in terms]), dict(terms)


def test_polynomial_evaluation_and_norms():
    t, coeffs = real_poly(1)
    x = 0.7
    direct = sum(c * cmath.exp(1j * k[0] * x) for k, c in coeffs.items())
    assert abs(t([x]) - direct) < 1e-12
    assert t.a_norm() == pytest.approx(sum(abs(c) for c in coeffs.values()), rel=1e-13)
    assert t.l2_norm() == pytest.approx(math.sqrt(sum(abs(c) ** 2 for c in coeffs.values())), rel=1e-13)
    # grid L_2 agrees with Parseval
    assert t.norm(2.0) == pytest.approx(t.l2_norm(), rel=1e-10)
    # sup norm from a fine brute-force scan
    scan = max(abs(t([2 * math.pi * i / 4096])) for i in range(4096))
    assert t.norm(math.inf, 64) == pytest.approx(scan, rel=1e-4)
    assert t.is_real(1e-14)
    with pytest.raises(st.Error):
        st.TrigPolynomial(2, [([1], 1.0)])


def test_l2_oracle_matches_tail_of_sorted_coefficients():
    f = st.random_box_polynomial([3, 3], 5)
    d = st.TrigDictionary([3, 3], 2.0)
    assert len(d) == 49
    residuals, _ = st.wcga(f, d, 1.0, 10)
    for m in (1, 4, 9):
        assert residuals[m - 1] == pytest.approx(st.oracle_sigma(f, d, m), abs=1e-10)
    assert all(a >= b - 1e-12 for a, b in zip(residuals, residuals[1:]))


def test_ia_conserves_a_norm():
    f = st.random_box_polynomial([4, 4], 3)
    d = st.TrigDictionary([4, 4], 4.0, unit=True)
    residuals, g = st.ia_epsilon(f, d, 16)
    assert len(residuals) == 16
    assert g.real_a_norm() == pytest.approx(1.0, abs=1e-12)
    approx, err = st.g_p_m(f, 8, 4.0)
    assert approx.real_a_norm() == pytest.approx(f.real_a_norm(), rel=1e-12)
    assert err > 0


def test_fit_rate_recovers_exact_power_law():
    rows = [(m, 3.0 * m ** -1.5 * math.log(m) ** 2) for m in (10, 20, 40, 80, 160)]
    fit = st.fit_rate(rows, 2.0)
    assert fit["slope"] == pytest.approx(-1.5, abs=1e-12)
    assert fit["intercept"] == pytest.approx(math.log(3.0), abs=1e-12)


def test_classes_and_rate_lines():
    spec = st.ClassSpec.H(1.5, 2.0, 2)
    f = st.sample_class(spec, 5, 11)
    assert st.class_norm(f, spec) <= 1.0 + 1e-12
    line = st.rate_line(st.ClassSpec.W(1.5, 2.0, 2), 2.0, 0.5)
    assert line["id"] == "W:2<=q<=p"
    assert line["rho"] == pytest.approx(1.5)
    with pytest.raises(st.RegimeError):
        st.rate_line(st.ClassSpec.W(1.5, 2.0, 2), 2.0, 2.0)


def test_fejer_and_sparse_grids():
    k = st.fejer_kernel(3, 1)
    coeffs = {tuple(f): c for f, c in k.terms()}
    assert sorted(coeffs) == [(j,) for j in range(-2, 3)]
    for j in range(-2, 3):
        assert coeffs[(j,)] == pytest.approx(1 - abs(j) / 3, abs=1e-15)
    # |SG(n)| with half-period grids: sum over compositions of prod 2^{n_j}
    n, d = 4, 2
    assert len(st.sparse_grid(n, d)) == len({(a / 2 ** i, b / 2 ** (n - i)) for i in range(n + 1)
                                             for a in range(2 ** i) for b in range(2 ** (n - i))})
    pts, w = st.smolyak_cubature(5, 2)
    assert sum(w) == pytest.approx(1.0, abs=1e-13)
    # exact on e^{i(k,x)} for k in Q_5: brute force over the returned rule
    for k in [(0, 0), (3, 0), (4, 2), (-7, 1), (16, 0), (-2, -5)]:
        val = sum(wi * cmath.exp(1j * (k[0] * p[0] + k[1] * p[1])) for p, wi in zip(pts, w))
        assert abs(val - (1.0 if k == (0, 0) else 0.0)) < 1e-12
    t = st.TrigPolynomial(2, [([0, 0], 0.25), ([3, 5], 1.0), ([-3, -5], 1.0)])
    assert st.smolyak_integrate(t, 5) == pytest.approx(0.25, abs=1e-13)


def test_presets_and_run():
    names = st.preset_names()
    assert "oracle-l2" in names and "cubature-h" in names
    cfg = st.preset("oracle-l2")
    cfg.update(box=[3, 3], m_max=6, seeds=[1, 2])
    csv, summary, code = st.run_experiment(cfg)
    assert code == 0
    assert csv.splitlines()[0] == "seed,m,residual,sigma,difference"
    assert len(csv.splitlines()) == 1 + 2 * 6
    assert summary["id"] == "oracle-l2"
    bad = dict(cfg, bogus=1)
    with pytest.raises(ValueError):
        st.run_experiment(bad)
    assert json.loads(json.dumps(st.preset("ia-linf")))["p"] == "inf"
