"""Smoke test for the pyfdslab extension module.

Build the module and put it on the path first:

    cargo build -p pyfdslab --release
    cp target/release/libpyfdslab.so python/pyfdslab.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyfdslab as fl  # noqa: E402


def main():
    k3 = fl.Digraph.family("K:3")
    assert k3.n == 3 and len(k3.arcs()) == 6
    assert k3.feedback_vertex_number()[0] == 2
    assert fl.Digraph.parse("n 3\n0 1\n1 2\n").girth() is None

    alpha, witness = fl.guessing_number(k3, 2)
    assert alpha == 4 and len(witness) == 4
    assert fl.public_entropy(k3, 2) == 2

    f = fl.clique_guessing(3, 2)
    assert len(f.fixed_points()) == 4 and f.belongs_to(k3)
    assert f.metrics()["fixed_points"] == 4

    i = fl.instability(k3, 2, mode="exhaustive")
    assert (i.value, i.certified) == (1, "exact"), i
    w = i.witness()
    assert w.metrics()["i"] == 1 and w.belongs_to(k3)

    s = fl.stability(fl.Digraph.family("K:4"), 2, mode="construct")
    assert (s.value, s.certified) == (2, "upper-bound-matched"), s

    c = fl.coset_dimension(k3, 2)
    assert c.value == 2 and abs(c.log_value - 1.0) < 1e-12

    p7 = fl.affine_instability(fl.Digraph.family("paley:7"), 2)
    assert p7.value == 3
    assert p7.witness().tabulate().metrics()["i"] == 3

    simplex = fl.simplex_affine(3)
    assert simplex.metrics()["s"] == 3
    back = fl.load_fds(simplex.to_json())
    assert back.matrix() == simplex.matrix() and back.offset() == simplex.offset()

    glin = fl.linear_guessing(fl.Digraph.family("power:Cdir:3^2"), 2, mode="random", trials=1_000_000, seed=1)
    assert glin.value == 5, glin

    assert fl.ball_volume(2, 7, 1) == 8
    assert fl.ball_volume(3, 40, 40) == 3 ** 40
    assert fl.covering_radius(2, 3, [0]) == 3
    assert fl.remoteness(2, 3, [0]) == 0

    try:
        fl.instability(fl.Digraph.family("Cund:5"), 3, mode="exhaustive")
        raise AssertionError("expected CapExceeded")
    except fl.CapExceeded:
        pass
    try:
        fl.Digraph.family("nope:1")
        raise AssertionError("expected ValueError")
    except ValueError:
        pass

    passed, report = fl.run_suite("equivalences")
    assert passed and json.loads(report)["passed"]
    passed, report = fl.run_suite("fabricated-failure")
    assert not passed and json.loads(report)["counterexample"]["actual"] == "1"

    print("pyfdslab smoke test passed")


if __name__ == "__main__":
    main()
