import json

import numpy as np
import pytest

edmsnl = pytest.importorskip("edmsnl")


def test_k_operator_two_points():
    P = np.array([[0.0, 0.0], [3.0, 4.0]])
    D = edmsnl.k_op(P @ P.T)
    assert D[0, 1] == pytest.approx(25.0)
    B = edmsnl.k_dagger(D)
    assert np.allclose(edmsnl.k_op(B), D)


def test_svec_round_trip():
    S = np.array([[1.0, 2.0], [2.0, 3.0]])
    v = edmsnl.svec(S)
    assert v.shape == (3,)
    assert v @ v == pytest.approx(np.trace(S @ S))
    assert np.allclose(edmsnl.smat(v), S)


def test_generate_is_deterministic():
    a = edmsnl.generate(n=10, m=4, half_width=0.08, seed=3)
    b = edmsnl.generate(n=10, m=4, half_width=0.08, seed=3)
    assert a.edges == b.edges
    assert np.allclose(a.anchors.sum(axis=0), 0.0)
    assert json.loads(a.to_json())["n"] == 10


def test_instance_json_round_trip(tmp_path):
    inst = edmsnl.generate(n=10, m=4, half_width=0.08, seed=2)
    path = tmp_path / "inst.json"
    inst.save(path)
    back = edmsnl.Instance.load(path)
    assert back.edges == inst.edges
    assert np.allclose(back.x_true, inst.x_true)


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        edmsnl.generate(n=3, m=5)
    with pytest.raises(ValueError):
        edmsnl.Instance.from_json("{")


def test_clique_face_two_points():
    f = edmsnl.clique_face(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)
    assert np.allclose(f["eigenvalues"], [4.0, 0.5])


def test_noiseless_solve_and_locate():
    inst = edmsnl.generate(n=10, m=4, density=0.9, half_width=0.08, seed=1)
    res = edmsnl.solve(inst)
    assert res["status"] == "converged"
    assert abs(res["relgap"]) <= 1e-10
    assert res["certificate"]["holds"]
    assert res["trace"][0]["iter"] == 0
    for method in (1, 2):
        loc = edmsnl.locate(inst, res["ybar"], method)
        assert loc["measures"]["m2"] < 1e-3


def test_linearized_form_runs():
    inst = edmsnl.generate(n=10, m=4, noise=0.05, half_width=0.1, seed=4)
    res = edmsnl.solve(inst, form="linearized")
    assert res["status"] in ("converged", "maxIter", "numericalFailure")
    assert res["ybar"].shape == (14, 14)
    with pytest.raises(ValueError):
        edmsnl.solve(inst, form="cubic")


def test_compare_methods_rows():
    rows = edmsnl.compare_methods([1, 2], n=10, m=4, threads=1)
    assert [r["seed"] for r in rows] == [1, 2]
    assert all(r["ok"] for r in rows)
    assert rows[0]["method2"]["m2"] is not None
