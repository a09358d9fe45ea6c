"""Smoke test for the ordsep Python module.

Run after `maturin develop -m crates/py/Cargo.toml`, or directly against a
cargo build: `cargo build --release -p ordsep-py && python3 python/smoke_test.py`.
"""

import importlib.util
import json
import pathlib
import shutil
import sys
import tempfile


def load():
    try:
        import ordsep

        return ordsep
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libordsep.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp()) / "ordsep.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("ordsep", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("ordsep module not found; build it with cargo build --release -p ordsep-py")


def inverse(word):
    return " ".join(t[:-3] if t.endswith("^-1") else t + "^-1" for t in reversed(word.split()))


def main():
    ordsep = load()

    f = ordsep.FreeGroup(["x", "y"])
    assert f.reduce("x x^-1 y") == "y"
    assert f.root("x y x y") == ("x y", 2)
    g = f.conjugator("x y", "y x")
    assert g is not None and f.reduce(f"{inverse(g)} x y {g}") == "y x"
    assert f.commensurable("x y", "y x")
    assert not f.commensurable("x", "y")

    q = f.exact_order("x x y", 6)
    assert q.order("x x y") == 6 and q.verify()

    q = f.equalize(["x", "y"], "x y", p=2, min_order=4)
    assert q.order("x") == q.order("y") > q.order("x y")
    back = ordsep.Quotient.from_json(q.to_json())
    assert back.verify() and back.degree == q.degree

    n, index, graph = f.oracle("x", "y", nmax=3)
    assert n == 2 and graph.order("x") != graph.order("y")

    am = ordsep.Amalgam()
    assert am.reduce("A:{y x} B:{s} A:{y}") == "A:{y x x y}"
    assert am.conjugator("A:{y}", "A:{x^-1 y x}") == "A:{x}"
    sep = am.separate("A:{y} B:{t}", "A:{y} B:{t^-1}")
    assert sep.order("A:{y} B:{t}") != sep.order("A:{y} B:{t^-1}")
    assert sep.verify()
    assert json.loads(sep.to_json())["graph"]["degree"] == sep.degree
    assert sep.to_dot().startswith("digraph")

    try:
        am.separate("A:{y} B:{t}", "B:{t} A:{y}")
    except ordsep.OrdsepError as e:
        assert "CONJUGATE_INPUTS" in str(e)
    else:
        raise AssertionError("conjugate inputs were separated")

    try:
        am.separate("A:{y x} B:{t}", "A:{y} B:{t s}", budget=10)
    except ordsep.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget was not enforced")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
