"""Smoke test for the selflink Python extension.

Uses an installed `selflink` module if there is one; otherwise builds the
extension with cargo and loads it from a temporary directory.
"""

import importlib
import json
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("selflink")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "selflink-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libselflink.so"
    if not lib.exists():
        lib = ROOT / "target" / "release" / "libselflink.dylib"
    dest = pathlib.Path(tempfile.mkdtemp()) / ("selflink" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))
    return importlib.import_module("selflink")


def main():
    sl = load()

    circle = sl.Curve.circle(1.0)
    flat = sl.Framing.projection(circle, [0.0, 0.0, 1.0])
    report = sl.self_link(circle, flat.add_twists(3))
    assert report.sl == 3 and report.oracle_agrees, report
    assert sl.self_link(circle, flat, oracle=False).framing_class == "nontrivial"

    trefoil = sl.Curve.torus_knot(2, 3, 2.0, 0.5)
    frenet = sl.Framing.frenet(trefoil)
    report = sl.self_link(trefoil, frenet)
    assert report.sl == -3 and report.oracle_sl == -3, report
    assert abs(report.sl_real + 3) < 1e-2
    assert abs(frenet.twist(2048) - sl.total_torsion(trefoil, 2048)) < 1e-6
    assert json.loads(report.to_json())["schema_version"] == 1

    assert sl.diagram_writhe(trefoil, [0.0, 0.0, 1.0]) == -3
    writhe, _ = sl.writhe(trefoil, 512)
    twist = sl.Framing.projection(trefoil, [0.0, 0.0, 1.0]).twist()
    assert round(writhe + twist) == -3

    partner = sl.Curve.from_json('{"kind": "circle", "params": {"rot_x": 0.25, "cx": 1.0}}')
    value, _ = sl.linking(circle, partner)
    assert abs(abs(value) - 1) < 1e-4
    assert sl.combinatorial_linking(circle, partner, [0.3, -0.2, 1.0]) == round(value)
    assert len(sl.crossings([circle, partner], [0.3, -0.2, 1.0])) == 2

    try:
        sl.swaddle_correction(flat)
    except sl.SelfLinkError:
        pass
    else:
        raise AssertionError("constant circle framing should have no swaddling lift")
    assert abs(sl.swaddle_correction(flat.add_twists(1)) - 1) < 1e-8

    try:
        sl.Curve.torus_knot(2, 4, 2.0, 0.5)
    except sl.SelfLinkError:
        pass
    else:
        raise AssertionError("non-coprime torus knot accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
