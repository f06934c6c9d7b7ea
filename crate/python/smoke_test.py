"""Smoke test for the ilssvm_py extension module.

Build first with `cargo build --release -p ilssvm-py`, then run
`python3 python/smoke_test.py`; the script puts the built library on the path.
"""

import math
import os
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libilssvm_py.so"
        if lib.exists():
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(tmp, "ilssvm_py.so"))
            sys.path.insert(0, tmp)
            break
    import ilssvm_py

    return ilssvm_py


def main():
    il = load()

    e = il.Expr("x1*x2 + sin(x1)")
    assert abs(e.eval([2.0, 3.0]) - (6.0 + math.sin(2.0))) < 1e-12
    try:
        il.Expr("x1 +")
    except il.IlssvmError as err:
        assert "syntax" in str(err)
    else:
        raise AssertionError("parse error expected")

    ds = il.Dataset.builtin("plane1", seed=0)
    assert len(ds) == 60 and ds.attr_names == ["x1", "x2"]
    assert len(il.BUILTIN_NAMES) == 8

    f = [1.0, 2.0, 4.0]
    assert abs(il.interpretation_distance(f, [v + 5 for v in f])) < 1e-12
    assert abs(il.mse(f, f)) == 0.0

    interp, dist = il.InterpModel.fit(ds, seed=0)
    assert dist < 0.01, dist

    k = il.Kernel.rbf(1.0)
    g = k.gram(ds.x[:3])
    assert all(abs(g[i][i] - 1.0) < 1e-12 for i in range(3))

    model = il.Model.fit_dataset(ds, k, phi=10.0, sigma=1.0, interp=interp)
    pred = model.predict(ds.x)
    assert il.mse(pred, ds.y_clean) < 0.5
    back = il.Model.from_text(model.to_text())
    assert back.predict(ds.x[:5]) == pred[:5]

    folds = il.kfold(60, 10, 0)
    assert sorted(i for fold in folds for i in fold) == list(range(60))

    lssvm = dict(il.cross_validate(ds, interp, k, 10.0, 0.0))
    ilssvm = dict(il.cross_validate(ds, interp, k, 10.0, 1.0))
    assert ilssvm["R_ID"] < lssvm["R_ID"], (lssvm, ilssvm)

    theta, eps, total = il.equilibrium_bound(m=1000, delta=0.05)
    assert theta > 0 and eps > 0 and total >= eps

    print("smoke test passed")


if __name__ == "__main__":
    main()
