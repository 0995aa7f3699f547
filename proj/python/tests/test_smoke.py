import math

import numpy as np
import pytest

import tissuegmm as tg


def test_geometry_examples():
    assert tg.wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert tg.slerp_angle(0.0, math.pi / 2, 0.5) == pytest.approx(math.pi / 4, abs=1e-12)
    p = tg.apply_inverse(math.pi / 2, [1.0, 1.0], [2.0, 1.0])
    assert np.allclose(p, [0.0, -1.0], atol=1e-12)
    assert tg.pca_angle([[0, 0], [0, 2], [0, 4]]) == pytest.approx(math.pi / 2)
    assert tg.angle_error(math.radians(10), math.radians(350)) == pytest.approx(20.0)


def test_errors_carry_kind():
    with pytest.raises(tg.TissueGmmError, match="DomainError"):
        tg.slerp_angle(0.0, 1.0, 1.5)
    with pytest.raises(tg.TissueGmmError, match="InsufficientPoints"):
        tg.pca_angle([[1.0, 1.0]])


def test_noiseless_scene_recovers_ground_truth():
    cfg = tg.SceneConfig()
    cfg.frame_count = 40
    cfg.noise_sigma = 0.0
    tracks, truth = tg.generate_scene(cfg)
    data = tg.assemble_datapoints(tracks)
    assert data.shape == (40, 4)
    assert np.abs(data[:, :3] - truth[:, :3]).max() < 1e-6
    moved = tg.assemble_datapoints(tracks.transformed(0.4, [100.0, -50.0]))
    assert np.abs(moved - data).max() < 1e-6


def test_train_predict_evaluate(tmp_path):
    tracks, _ = tg.generate_scene(tg.SceneConfig())
    data = tg.assemble_datapoints(tracks)
    cfg = tg.TrainConfig()
    cfg.components = 8
    model, loglik, diag = tg.em_train(data[:128], cfg)
    assert len(model) == 8
    assert sum(model.priors) == pytest.approx(1.0)
    assert np.all(np.diff(diag["loglik_trace"]) >= -1e-9)
    mean, cov, angle = tg.gmr(model, 0.5)
    assert mean.shape == (2,) and cov.shape == (2, 2)
    assert math.isfinite(angle)
    report = tg.evaluate(model, data, 128, 28)
    assert report["mean_train_pos_px"] < 3.0

    path = tmp_path / "model.json"
    tg.write_model(path, model, 156)
    again, frames = tg.read_model(path)
    assert frames == 156
    assert again.log_likelihood(data) == pytest.approx(model.log_likelihood(data), rel=1e-12)


def test_tracks_round_trip(tmp_path):
    cfg = tg.SceneConfig()
    cfg.frame_count = 5
    tracks, _ = tg.generate_scene(cfg)
    path = tmp_path / "tracks.csv"
    tg.write_tracks(path, tracks)
    assert tg.read_tracks(path) == tracks
    with pytest.raises(tg.TissueGmmError, match="NotFound"):
        tg.read_tracks(tmp_path / "missing.csv")
