"""Smoke test for the `ccl` extension module.

Build and install it first:
    pip install maturin
    pip install --no-build-isolation ./crates/ccl-py
"""

import ccl


def main():
    assert ccl.SCHEMA_VERSION == 1

    path = "U 16 5\n1 2 3\n2 3 4\n"
    out = ccl.run("apsp", path, seed=1)
    assert out["distances"][0][2] == 7, out["distances"][0][:3]

    graph = ccl.generate("graph", 10, seed=2)
    assert "padded from n=10 to n'=16" in graph
    assert ccl.compare("apsp", graph, seed=2)["verdict"] == "matrices identical"

    steiner = ccl.generate("steiner", 12, seed=3, terminals=4)
    assert ccl.compare("steiner", steiner, seed=3)["ok"]

    dmst = ccl.generate("dmst", 12, seed=4)
    res = ccl.compare("dmst", dmst, seed=4, model="measured")
    assert res["verdict"] == "weight equal", res["verdict"]

    try:
        ccl.run("dmst", "D 3 5\n1 2 1\n3 2 1\nR 1\n", seed=1)
    except ccl.AlgorithmFailure as e:
        assert "infeasible" in str(e)
    else:
        raise AssertionError("infeasible instance was accepted")

    try:
        ccl.run("steiner", "U 4 5\n1 2 1\n", seed=1)
    except ValueError:
        pass
    else:
        raise AssertionError("missing terminal line was accepted")

    h = ccl.formula("h", 1e18)
    assert abs(h / 1.1562889717838042e18 - 1) < 1e-12, h
    rows = ccl.crossovers()
    assert [r["formula"] for r in rows][:2] == ["h", "f"]

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
