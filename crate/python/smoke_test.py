#!/usr/bin/env python3
"""Smoke test for the `redcount` Python extension.

Build the module first, then run this script from anywhere:

    cargo build -p redcount-python --release
    python3 python/smoke_test.py

The script copies the built cdylib next to itself under the importable
name, imports it, and walks one example through every exposed operation.
"""

import json
import pathlib
import shutil
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libredcount.so",
        ROOT / "target" / "debug" / "libredcount.so",
        ROOT / "target" / "release" / "libredcount.dylib",
        ROOT / "target" / "debug" / "libredcount.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p redcount-python --release")
    staged = pathlib.Path(__file__).resolve().parent / "redcount.so"
    if not staged.exists() or staged.stat().st_mtime < built.stat().st_mtime:
        shutil.copy2(built, staged)
    sys.path.insert(0, str(staged.parent))
    import redcount

    return redcount


def main():
    rc = load_module()

    # Sampling is seeded and deterministic.
    inst = rc.sample_factored(k=2, n=4, g=2, b=1, predicate="ov", seed=7)
    again = rc.sample_factored(k=2, n=4, g=2, b=1, predicate="ov", seed=7)
    assert inst.to_json() == again.to_json(), "same seed must reproduce the instance"
    assert inst.kind() == "factored"

    # JSON round trip preserves the digest.
    back = rc.Instance.from_json(inst.to_json())
    assert back.digest() == inst.digest()

    # Conversions between predicate worlds preserve the exact count.
    want = inst.count()
    for step in ["generic-to-xor", "generic-to-ov", "generic-to-sum"]:
        out = rc.apply_step(inst, step)
        assert out.count() == want, f"{step} changed the count"
    assert inst.parity() == want % 2

    # A chain down to a ground SUM instance, with linked provenance.
    plan = '{"step":"generic-to-sum"}\n{"step":"ground-sum"}\n'
    ground, provenance = rc.run_chain(inst, plan, seed=3)
    assert ground.kind() == "sum"
    assert ground.count() == want, "grounding changed the count"
    log = json.loads(provenance)
    assert [s["step"] for s in log["steps"]] == ["generic-to-sum", "ground-sum"]
    assert log["steps"][0]["output"] == log["steps"][1]["input"]

    # Hard-distribution sampling returns the ground instance and the
    # factored preimage it was built from; counts agree exactly.
    ground, preimage = rc.sample_distribution("d-xor", 64, 4, 1, 2, seed=1)
    assert ground.kind() == "xor" and preimage.kind() == "factored"
    assert ground.count() == preimage.count()
    assert "table2-ov-from-eth" in rc.preset_names()
    g2, p2 = rc.sample_preset("table2-ov-from-eth", seed=1)
    assert g2.count() == p2.count()

    # Graphs and formulas: K5 has 10 triangles; an empty formula on 40
    # variables has 2^40 models (counts are exact Python ints).
    k5 = rc.Instance.from_json(
        json.dumps({"kind": "graph", "nodes": 5,
                    "edges": [[u, v] for u in range(5) for v in range(u + 1, 5)]})
    )
    assert k5.clique_count(3) == 10
    formula = rc.Instance.from_json(json.dumps({"kind": "cnf", "vars": 20, "clauses": []}))
    assert formula.count() == 2 ** 20

    # The verifier passes an honest step and catches a sabotaged one.
    passed, report = rc.verify('{"step":"ground-xor"}', trials=25, seed=2)
    assert passed, f"honest step failed verification: {report}"
    passed, report = rc.verify('{"step":"mutated-ground-xor"}', trials=200, seed=2)
    assert not passed, "sabotaged step must fail verification"
    failures = json.loads(report)["failures"]
    assert failures > 0

    # Bad input surfaces as ValueError, not a crash.
    try:
        rc.apply_step(inst, "ground-xor")
    except ValueError:
        pass
    else:
        raise AssertionError("applying ground-xor to an OV-predicate instance must fail")

    assert len(rc.step_names()) >= 15
    print("smoke test ok:", inst.__repr__(), "count", want)


if __name__ == "__main__":
    main()
