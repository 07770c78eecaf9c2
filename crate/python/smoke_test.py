"""Smoke test for the eigenbouquet_py extension.

Build first with `cargo build -p eigenbouquet-py --release` (or `maturin
develop -m crates/python/pyproject.toml`), then run this script from the
repository root.
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys


def load():
    try:
        import eigenbouquet_py

        return eigenbouquet_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libeigenbouquet_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("eigenbouquet_py", str(lib))
            spec = importlib.util.spec_from_loader("eigenbouquet_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("eigenbouquet_py not found; build it with cargo build -p eigenbouquet-py")


def main():
    eb = load()

    p = eb.Polynomial("x^2 - y^2", ["x", "y"])
    q = eb.Polynomial("x*y", ["x", "y"])
    assert str(p * q) == "x^3*y - x*y^3", str(p * q)
    assert p.eval([2.0, 1.0]) == (3.0, 0.0)
    assert str(p.derivative("x")) == "2*x"

    kupa = eb.Family(["x", "y"], [["x^2", "x*y"], ["x*y", "y^2"]])
    summary = kupa.analyze()
    assert summary["s_l"] == 2 and summary["d_l"] == 1, summary
    values, mults = kupa.eigenvalues([1.0, 1.0])
    assert mults == [1, 1] and math.isclose(values[1], 2.0), (values, mults)
    values, mults = kupa.eigenvalues([0.0, 0.0])
    assert mults == [2], (values, mults)

    try:
        eb.Family(["x"], [["x", "1"], ["0", "x"]])
    except ValueError:
        pass
    else:
        raise AssertionError("asymmetric family accepted")

    for name in eb.DEMO_NAMES:
        code, verdict, report = eb.run("check", eb.demo_config(name))
        assert code == 0 and verdict == "pass", (name, verdict)
        assert json.loads(report)["verdict"] == "pass"

    bare = json.dumps({"structure": "symmetric", "params": ["x", "y"], "matrix": [["x^2", "x*y"], ["x*y", "y^2"]]})
    code, verdict, _ = eb.run("resolve", bare)
    assert code == 3 and verdict == "unresolved", verdict

    print("smoke test passed")


if __name__ == "__main__":
    main()
