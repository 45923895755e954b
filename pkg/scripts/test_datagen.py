"""Tests for data generation, presets and dataset files."""

import numpy as np
import pytest

from src.adapters import AdapterFactory, CSVAdapter, JSONAdapter, load_dataset, save_dataset
from src.classifier import MlpModel, TrainConfig, accuracy, train_sgd
from src.data import (
    LabeledDataset,
    Regime,
    ShiftConfig,
    apply_shift,
    build_datasets,
    get_preset,
    list_presets,
    make_blobs,
    make_image_blobs,
    make_ood,
)
from src.errors import PlacementError


def test_blobs_are_balanced_and_seeded():
    data = make_blobs(3, 40, std=0.5, seed=1)
    assert data.points.shape == (120, 2)
    assert np.bincount(data.labels).tolist() == [40, 40, 40]
    assert data.regime == Regime.IN_DOMAIN
    assert np.array_equal(data.points, make_blobs(3, 40, std=0.5, seed=1).points)
    assert not np.array_equal(data.points, make_blobs(3, 40, std=0.5, seed=2).points)


def test_blobs_cluster_around_their_centers():
    centers = [[-4.0, 0.0, 1.0], [4.0, 0.0, -1.0]]
    data = make_blobs(2, 500, centers=centers, std=0.3, seed=0)
    for c in range(2):
        assert np.allclose(data.points[data.labels == c].mean(axis=0), centers[c], atol=0.1)


def test_blobs_reject_bad_arguments():
    with pytest.raises(ValueError):
        make_blobs(1, 10)
    with pytest.raises(ValueError):
        make_blobs(2, 10, std=0.0)
    with pytest.raises(ValueError):
        make_blobs(2, 10, centers=[[0.0, 0.0], [0.0, 0.0]])


def test_vector_shift_rotates_and_keeps_labels():
    data = LabeledDataset(np.array([[1.0, 0.0], [0.0, 2.0]]), np.array([0, 1]), num_classes=2)
    shifted = apply_shift(data, ShiftConfig(rotation_deg=90.0, translate=(1.0,)))

    assert shifted.regime == Regime.SHIFTED
    assert np.allclose(shifted.points, [[1.0, 1.0], [-1.0, 0.0]])
    assert shifted.labels.tolist() == [0, 1]


def test_identity_shift_and_full_turn_keep_points():
    data = make_blobs(3, 30, std=0.7, seed=6)
    assert np.array_equal(apply_shift(data, ShiftConfig()).points, data.points)
    assert np.allclose(apply_shift(data, ShiftConfig(rotation_deg=360.0)).points, data.points, rtol=0.0, atol=1e-9)


def test_large_translation_costs_accuracy():
    data = make_blobs(2, 100, centers=[[-2.0, 0.0], [2.0, 0.0]], std=0.5, seed=8)
    model = train_sgd(MlpModel.initialize([2, 8, 2], seed=8), data, TrainConfig(lr=0.1, epochs=30, seed=8)).model
    moved = apply_shift(data, ShiftConfig(translate=(10.0, 10.0)))

    before = accuracy(model, data)
    assert before >= 0.95
    assert np.mean(model.classify(moved.points) == moved.labels) < before


def test_shift_noise_is_seeded():
    data = make_blobs(2, 20, centers=[[-1.0, 0.0], [1.0, 0.0]], std=0.2, seed=0)
    cfg = ShiftConfig(additive_noise_std=0.5, seed=3)
    assert np.array_equal(apply_shift(data, cfg).points, apply_shift(data, cfg).points)


def test_image_shift_translates_pixels():
    image = np.zeros((8, 8))
    image[3, 3] = 1.0
    data = LabeledDataset(image.reshape(1, -1), np.array([0]), num_classes=2, image_shape=(8, 8))
    moved = apply_shift(data, ShiftConfig(translate=(1.0, 0.0))).points.reshape(8, 8)

    assert moved[3, 4] == pytest.approx(1.0)
    assert moved[3, 3] == pytest.approx(0.0)


def test_image_data_stays_in_unit_range():
    data = make_image_blobs(4, 30, jitter_std=0.3, seed=2)
    assert data.image_shape == (8, 8)
    shifted = apply_shift(data, ShiftConfig(rotation_deg=20.0, scale=1.2, additive_noise_std=0.3, seed=1))
    for points in (data.points, shifted.points):
        assert points.min() >= 0.0 and points.max() <= 1.0


def test_shift_needs_in_domain_data():
    data = make_blobs(2, 5, centers=[[-1.0, 0.0], [1.0, 0.0]], std=0.1)
    shifted = apply_shift(data, ShiftConfig())
    with pytest.raises(ValueError):
        apply_shift(shifted, ShiftConfig())


def test_ood_points_keep_their_distance():
    data = make_blobs(3, 50, std=0.5, seed=0)
    ood = make_ood(100, data, min_distance=2.0, seed=4)

    assert ood.regime == Regime.OOD and ood.labels is None
    distances = np.linalg.norm(ood.points[:, None, :] - data.class_centers()[None, :, :], axis=2)
    assert distances.min() >= 2.0


def test_ood_is_seeded_and_may_be_empty():
    data = make_blobs(3, 50, std=0.5, seed=0)
    first = make_ood(40, data, min_distance=1.0, seed=9)
    assert np.array_equal(first.points, make_ood(40, data, min_distance=1.0, seed=9).points)
    assert not np.array_equal(first.points, make_ood(40, data, min_distance=1.0, seed=10).points)

    empty = make_ood(0, data, min_distance=1.0)
    assert empty.points.shape == (0, 2) and empty.regime == Regime.OOD


def test_ood_placement_gives_up():
    data = make_blobs(2, 10, centers=[[0.0, 0.0], [1.0, 0.0]], std=0.1)
    with pytest.raises(PlacementError, match="after 2 attempt"):
        make_ood(10, data, min_distance=5.0, max_attempts=2)


def test_presets():
    assert list_presets() == ["blobs3", "blobs2-adv", "image8"]
    with pytest.raises(ValueError, match="Available"):
        get_preset("mnist")


@pytest.mark.parametrize("name", ["blobs3", "blobs2-adv", "image8"])
def test_presets_build_all_regimes(name):
    sets = build_datasets(get_preset(name), seed=0)
    assert sets.in_domain.dim == sets.shifted.dim == sets.ood.dim
    assert np.array_equal(sets.in_domain.labels, sets.shifted.labels)
    assert len(sets.ood) == get_preset(name).ood_points


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_dataset_files(tmp_path, suffix):
    sets = build_datasets(get_preset("image8"), seed=1)
    for data in (sets.shifted, sets.ood):
        path = save_dataset(data, tmp_path / f"{data.regime.value}{suffix}")
        loaded = load_dataset(path)

        assert loaded.regime == data.regime
        assert loaded.image_shape == data.image_shape
        assert np.array_equal(loaded.points, data.points)
        if data.labels is None:
            assert loaded.labels is None
        else:
            assert np.array_equal(loaded.labels, data.labels)


def test_csv_layout(tmp_path):
    data = LabeledDataset(np.array([[0.5, -1.0]]), None, num_classes=2, regime=Regime.OOD)
    path = CSVAdapter().write(data, tmp_path / "ood.csv")
    lines = path.read_text().splitlines()

    assert lines[:3] == ["# dim=2", "# num_classes=2", '# regime="ood"']
    assert lines[3:] == ["f0,f1,label", "0.5,-1.0,"]


def test_adapter_factory():
    assert isinstance(AdapterFactory.get_adapter("CSV"), CSVAdapter)
    assert isinstance(AdapterFactory.for_path("x/data.json"), JSONAdapter)
    with pytest.raises(ValueError, match="Unsupported format"):
        AdapterFactory.get_adapter("parquet")
