#!/usr/bin/env python3
"""Smoke test for the evlogic_py extension module.

Build the module first, then run this script from anywhere:

    cargo build -p evlogic-py
    python3 python/smoke_test.py

It copies the built cdylib into a temp directory under an importable name,
imports it, and exercises the bindings end to end.
"""

import pathlib
import shutil
import sys
import tempfile

REPO = pathlib.Path(__file__).resolve().parent.parent


def import_module():
    candidates = [
        REPO / "target" / "debug" / "libevlogic_py.so",
        REPO / "target" / "release" / "libevlogic_py.so",
        REPO / "target" / "debug" / "libevlogic_py.dylib",
        REPO / "target" / "release" / "libevlogic_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p evlogic-py")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="evlogic-py-"))
    shutil.copy2(built, stage / "evlogic_py.so")
    sys.path.insert(0, str(stage))
    import evlogic_py

    return evlogic_py


def main():
    ev = import_module()

    # A satisfiable case study: the committee-network investigation.
    dnc = ev.parse((REPO / "corpus" / "dnc.el").read_text(), "dnc.el")
    result = ev.run(dnc)
    assert result.sat, "the committee-network theory is satisfiable"
    assert "t1: Attack" in result.plausible, result.plausible
    assert "t2: PhysA" not in result.model
    assert result.stats["D2"] == 1, result.stats
    assert ev.check_conditions(result.theory()) == []

    # A contradictory input closes, names its rule, and keeps no facts.
    xp = ev.parse((REPO / "corpus" / "closure_xp.el").read_text(), "closure_xp.el")
    closed = ev.run(xp)
    assert not closed.sat
    assert closed.witness == "XP"
    assert closed.model == []
    assert closed.theory().is_closed()

    # Rendered text parses back to a theory with the same outcome.
    round_tripped = ev.run(ev.parse(dnc.render(), "rendered"))
    assert round_tripped.model == result.model

    # Parse errors surface as ValueError with positions.
    try:
        ev.parse("evidence ghost @ t1 : X.", "bad.el")
    except ValueError as e:
        assert "bad.el" in str(e), e
    else:
        sys.exit("expected a parse error for undeclared names")

    # Generated theories run the same under any instance schedule.
    gen = ev.generate(seed=7, bias=0.8)
    base = ev.run(gen)
    for seed in range(3):
        shuffled = ev.run_seeded(gen, seed)
        assert shuffled.sat == base.sat
        assert shuffled.model == base.model

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
