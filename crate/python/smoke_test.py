#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Build the extension first, then run this script:

    cargo build -p cocycle-lab-py
    python3 python/smoke_test.py

It locates the built cdylib, imports it under the module name, and checks a
few cross-language invariants: the translation closed form, the half-plane
triangle identity, and suite-report determinism.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_bindings():
    candidates = [
        REPO / "target" / "debug" / "libcocycle_lab_py.so",
        REPO / "target" / "release" / "libcocycle_lab_py.so",
        REPO / "target" / "debug" / "libcocycle_lab_py.dylib",
        REPO / "target" / "release" / "libcocycle_lab_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run `cargo build -p cocycle-lab-py` first")
    stage = Path(tempfile.mkdtemp(prefix="cocycle-smoke-"))
    shutil.copy2(built, stage / "cocycle_lab_py.so")
    sys.path.insert(0, str(stage))
    import cocycle_lab_py

    return cocycle_lab_py


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"|{a} - {b}| > {tol}"


def mat_mul(g, h):
    a, b, c, d = g
    e, f, i, j = h
    return (a * e + b * i, a * f + b * j, c * e + d * i, c * f + d * j)


def main():
    lab = import_bindings()
    assert lab.SCHEMA_VERSION == 1

    # Translation cocycle: closed form and quadrature agree on the unit pair.
    approx(lab.heisenberg([1.0, 0.0], [0.0, 1.0]), 0.5, 1e-12)
    flat = lab.Model.flat(1)
    engine = lab.Engine(flat)
    g = lab.Element.translation([1.0, 0.0])
    h = lab.Element.translation([0.0, 1.0])
    approx(engine.cocycle(g, h), 0.5, 1e-9)
    approx(engine.cocycle_identity_residual(g, h, g.compose(h)), 0.0, 1e-9)

    # Element algebra: act/compose/inverse round-trip.
    p = g.compose(h).act([0.25, -0.5])
    assert p == [1.25, 0.5], p
    q = g.inverse().act(g.act([0.1, 0.2]))
    approx(q[0], 0.1, 1e-14)
    approx(q[1], 0.2, 1e-14)

    # Half-plane master identity: C + D(gamma) = triangle circulation.
    g1 = (2.0, 0.0, 0.0, 0.5)
    g2 = (1.0, 1.0, 0.3, 1.0)
    h2 = lab.Model.half_plane()
    eng2 = lab.Engine(h2)
    c = eng2.cocycle(lab.Element.moebius(*g1), lab.Element.moebius(*g2))
    dgamma = (
        lab.triangle_gamma(g2)
        - lab.triangle_gamma(mat_mul(g1, g2))
        + lab.triangle_gamma(g1)
    )
    gw = lab.triangle_cocycle(g1, g2)
    approx(c + dgamma - gw, 0.0, 1e-7)
    assert abs(gw) < 3.141592653589793

    # Suite reports: passing, parseable, and byte-identical per seed.
    first = lab.verify("r2n:1", seed=2, samples=3)
    second = lab.verify("r2n:1", seed=2, samples=3)
    assert first == second, "same scenario must reproduce byte-for-byte"
    report = json.loads(first)
    assert report["schema_version"] == 1
    assert report["summary"]["failed"] == 0
    assert report["summary"]["errors"] == 0

    experiment = json.loads(lab.disk_experiment(words=4, depth=3, seed=9))
    statuses = {case["id"]: case["status"] for case in experiment["cases"]}
    assert statuses["fit/disk-twists@1"] == "info"
    assert statuses["fit/heisenberg-negative"] == "pass"

    # Tolerance overrides reach the report.
    tightened = json.loads(
        lab.verify("r2n:1", seed=2, samples=2, tolerances={"geom/primitive": 1e-6})
    )
    case = next(c for c in tightened["cases"] if c["id"] == "geom/primitive")
    assert case["tolerance"] == 1e-6

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
