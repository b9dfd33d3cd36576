import math
import os
import subprocess

import pytest

import hyperifs as h


def test_geometry():
    assert h.dist(h.Manifold.Circle, [0.1], [0.9]) == pytest.approx(0.2)
    assert h.ball_measure(h.Manifold.Torus2, 0.1) == pytest.approx(math.pi * 0.01)
    assert h.manifold("sphere") == h.Manifold.Sphere2
    with pytest.raises(ValueError):
        h.ball_measure(h.Manifold.Circle, 0.7)


def test_words_and_orbits():
    rot = h.rotation_system(0.25)
    assert rot.apply_word([1, 1], [0.1])[0] == pytest.approx(0.6)
    orbit = rot.fiberwise_orbit([1] * 4, [0.0])
    assert [p[0] for p in orbit] == pytest.approx([0.25, 0.5, 0.75, 0.0], abs=1e-12)


def test_circle_example():
    assert h.compute_k(0.1, 0.05) == 9
    om = h.omega_construction(0.5, 1)
    assert om["symbols"] == [1]
    w = h.circle_witness(0.1, 0.6, 0.02)
    assert w["found"] and w["certified_distance"] < 0.02 / 6


def test_sphere_and_reports():
    sphere = h.sphere_system()
    ax = h.word_rotation_axis([1])
    assert abs(abs(ax["axis"][2]) - 1) < 1e-12
    rep = h.check_hyper_minimal(sphere, pairs=3, radii=[0.05], seed=3)
    assert rep["passed"] and rep["aggregate"]["success_rate"] == 1.0
    ov = h.check_overlap_number(h.Manifold.Circle, radii=[0.1], samples=10)
    assert ov["aggregate"]["min_relative_margin"] == pytest.approx(1 / 15)


def test_coverage_and_density():
    rat = h.rotation_system(1 / 3)
    cov = h.invariant_hull_coverage(rat, [0.3], 0.005, 1e-3)
    assert cov[-1] == pytest.approx(0.03, abs=0.005)
    assert not h.check_minimality_density(rat, [0.1], 0.1)["dense"]


def test_run_cli_in_process(tmp_path):
    code, out, _ = h.run_cli(["--seed", "1", "--out", str(tmp_path), "verify-overlap"])
    assert code == 0 and (tmp_path / "overlap.json").exists()
    assert h.run_cli(["verify-overlap"])[0] == 2


@pytest.mark.skipif("HYPERIFS_CLI" not in os.environ, reason="CLI binary location not provided")
def test_cli_binary(tmp_path):
    proc = subprocess.run(
        [os.environ["HYPERIFS_CLI"], "--seed", "1", "--out", str(tmp_path), "verify-overlap", "--t", "0.5", "--ell", "0.99"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
