"""Smoke test for the `transversal` extension module.

Build and install first:

    pip install maturin
    pip install --no-build-isolation -e crates/py

then run `python python/smoke_test.py`.
"""

import math

import transversal
from transversal import Scene


def collinear():
    return Scene([([3.0 * k, 0.0, 0.0], 1.0) for k in range(3)])


def main():
    s = collinear()
    assert len(s) == 3 and s.dimension == 3
    assert Scene.from_json(s.to_json()).balls == s.balls

    # the axis direction is deep inside the cone for 0, 1, 2
    f = s.feasible([0, 1, 2], [1.0, 0.0, 0.0])
    assert f["feasible"] and f["slack"] < 0

    cat = s.geometric_permutations(samples=5000)
    assert len(cat["permutations"]) == 1
    assert s.count_components(samples=5000)["components"] == 1

    conv = s.check_convexity([0, 1, 2], pairs=200, lattice=3000)
    assert not conv["violations"], conv["violations"][:3]

    # sigma is even and homogeneous of degree 6
    u = [0.3, -0.7, 0.2]
    v = [2 * x for x in u]
    assert math.isclose(s.sigma(v), 64 * s.sigma(u), rel_tol=1e-9)
    assert math.isclose(s.sigma([-x for x in u]), s.sigma(u), rel_tol=1e-12)

    stabbed = Scene.generate(3, with_transversal=True, seed=7)
    flex = stabbed.probe_flex(samples=40)
    assert flex["pass"], flex["min_margin"]
    sample = flex["samples"][0]
    lines = stabbed.tangent_lines(sample["direction"])
    assert "Lines" in lines and lines["Lines"]

    suite = transversal.verify_identities(trials=20, seed=42)
    assert all(r["passed"] for r in suite["identities"]), suite

    try:
        Scene([([0.0, 0.0, 0.0], 1.0), ([1.0, 0.0, 0.0], 1.0)])
    except ValueError:
        pass
    else:
        raise AssertionError("overlapping balls accepted")

    print(f"transversal {transversal.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
