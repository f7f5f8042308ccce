"""
Pipeline commands. Each command reads the artifacts of earlier commands from the output directory
and replaces its own outputs there.

    <out_dir>/fixture/, fixture_test/          fixture
    model.vae, loss_curve.csv/.svg,            train
    train_summary.json
    synthetic/                                 generate
    rotation/                                  augment
    latent.csv/.svg/.json                      project
    metrics.json, metrics.csv                  classify
    comparison.csv/.svg/.json                  compare
    interpolation/                             interpolate
    report.md                                  report
"""
import json
import logging
import shutil
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List

from vaesynth.cli.config import MissingInputError, RunConfig
from vaesynth.cli.report import format_report
from vaesynth.dataio.csvio import write_csv
from vaesynth.dataio.io import ensure_writable_dir, ls
from vaesynth.dataio.manifest import scan_manifest
from vaesynth.dataio.pgm import write_pgm
from vaesynth.evalkit.classifier import train_classifier
from vaesynth.evalkit.metrics import confusion, metrics_from_confusion
from vaesynth.evalkit.split import stratified_split_by_origin
from vaesynth.latentmap.cloud import latent_cloud
from vaesynth.latentmap.pca import pca_2d
from vaesynth.latentmap.plot import plot_projection_svg, write_projection_csv
from vaesynth.latentmap.separation import cluster_separation
from vaesynth.latentmap.tsne import tsne_2d
from vaesynth.synthgen.fixture import make_fixture_dataset
from vaesynth.synthgen.generator import (RECONSTRUCTED_SUFFIX, REPORT_FILE, generate_synthetic_dataset,
                                         interpolate_latent)
from vaesynth.synthgen.preprocess import LabeledImages, load_labeled_images, quantize
from vaesynth.synthgen.rotate import baseline_rotate_augment
from vaesynth.vae.loss_curve import LossCurve, plot_loss_curves
from vaesynth.vae.model import VaeModel
from vaesynth.vae.serialize import load_model, save_model
from vaesynth.vae.trainer import evaluate_test_loss, train

logger = logging.getLogger(__name__)

FIXTURE_DIR = "fixture"
FIXTURE_TEST_DIR = "fixture_test"
MODEL_FILE = "model.vae"
LOSS_CSV = "loss_curve.csv"
LOSS_SVG = "loss_curve.svg"
TRAIN_SUMMARY = "train_summary.json"
SYNTHETIC_DIR = "synthetic"
ROTATION_DIR = "rotation"
LATENT_CSV = "latent.csv"
LATENT_SVG = "latent.svg"
LATENT_JSON = "latent.json"
METRICS_JSON = "metrics.json"
METRICS_CSV = "metrics.csv"
COMPARISON_CSV = "comparison.csv"
COMPARISON_SVG = "comparison.svg"
COMPARISON_JSON = "comparison.json"
INTERPOLATION_DIR = "interpolation"
REPORT_MD = "report.md"


class StaleArtifactError(ValueError):
    """Raised when an artifact is older than an input it was derived from."""


def _remove(path: Path) -> None:
    if path.is_dir():
        shutil.rmtree(path)
    elif path.exists():
        path.unlink()


@contextmanager
def outputs(*paths: Path) -> Iterator[None]:
    """
    Replace the given output files and directories.

    Existing outputs are removed before the block runs and whatever the block wrote is removed again
    when it raises.
    """
    for p in paths:
        _remove(p)
    try:
        yield
    except BaseException:
        for p in paths:
            _remove(p)
        logger.warning("removed the outputs of the failed command: %s", ", ".join(str(p) for p in paths))
        raise


def write_json(data: Any, path: Path) -> None:
    with open(path, "w", newline="\n") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def read_json(path: Path) -> Any:
    with open(require(path)) as f:
        return json.load(f)


def require(path: Path) -> Path:
    """Return `path` if it exists, raise MissingInputError otherwise."""
    path = Path(path)
    if not path.exists():
        raise MissingInputError(path)
    return path


def _load_dataset(cfg: RunConfig, root: Path) -> LabeledImages:
    return load_labeled_images(scan_manifest(require(root)), cfg.image_side)


def _load_model(cfg: RunConfig) -> VaeModel:
    return load_model(require(cfg.out_path / MODEL_FILE))


def _test_set(cfg: RunConfig) -> LabeledImages | None:
    if not cfg.test_dir and not cfg.test_path.exists():
        logger.warning("no held-out images at %s, the test loss is skipped", cfg.test_path)
        return None
    return _load_dataset(cfg, cfg.test_path)


def _test_loss(model: VaeModel, test: LabeledImages | None) -> Dict[str, float] | None:
    if test is None:
        return None
    rec, kld, total = evaluate_test_loss(model, test.x)
    return {"reconstruction": rec, "kld": kld, "total": total}


def cmd_fixture(cfg: RunConfig) -> None:
    """Render the fixture corpus and its held-out test images."""
    train_dir, test_dir = cfg.out_path / FIXTURE_DIR, cfg.out_path / FIXTURE_TEST_DIR
    train_spec, test_spec = cfg.fixture_spec(), cfg.fixture_spec(test=True)
    with outputs(train_dir, test_dir):
        make_fixture_dataset(train_spec, train_dir).to_json(train_dir / "manifest.json")
        make_fixture_dataset(test_spec, test_dir, stream="fixture/test").to_json(test_dir / "manifest.json")


def cmd_train(cfg: RunConfig) -> None:
    """Train a model on the dataset and store it with its loss curve and summary."""
    train_cfg = cfg.train_config()
    data = _load_dataset(cfg, cfg.data_path)
    test = _test_set(cfg)
    out = ensure_writable_dir(cfg.out_path)
    paths = [out / MODEL_FILE, out / LOSS_CSV, out / LOSS_SVG, out / TRAIN_SUMMARY]
    with outputs(*paths):
        model = VaeModel.create(cfg.image_side, cfg.latent_dim, cfg.mode, seed=cfg.module_seed("vae"))
        model, curve = train(model, data.x, train_cfg)
        save_model(model, out / MODEL_FILE)
        curve.to_csv(out / LOSS_CSV)
        curve.plot_svg(out / LOSS_SVG)
        write_json({"train": train_cfg.to_dict(), "images": len(data), "final": curve.final(),
                    "test_loss": _test_loss(model, test), "param_sum_square": model.params.sum_square()},
                   out / TRAIN_SUMMARY)


def cmd_generate(cfg: RunConfig) -> None:
    """Expand the dataset with VAE reconstructions."""
    model = _load_model(cfg)
    manifest = scan_manifest(require(cfg.data_path))
    out = cfg.out_path / SYNTHETIC_DIR
    with outputs(out):
        generate_synthetic_dataset(manifest, model, cfg.num_images_per_sample, out, cfg.module_seed("synthgen"))


def cmd_augment(cfg: RunConfig) -> None:
    """Expand the dataset with randomly rotated copies."""
    manifest = scan_manifest(require(cfg.data_path))
    out = cfg.out_path / ROTATION_DIR
    with outputs(out):
        baseline_rotate_augment(manifest, cfg.num_images_per_sample, out, cfg.module_seed("augment"),
                                max_degrees=cfg.max_degrees, image_side=cfg.image_side)


def cmd_project(cfg: RunConfig) -> None:
    """Project the latent means of the dataset to 2-D."""
    model = _load_model(cfg)
    data = load_labeled_images(scan_manifest(require(cfg.data_path)), model.image_side)
    cloud = latent_cloud(model, data.x, [data.classes[i] for i in data.y])
    if cfg.projection == "pca":
        projection = pca_2d(cloud)
    else:
        projection = tsne_2d(cloud, cfg.perplexity, cfg.tsne_iterations, seed=cfg.module_seed("latentmap"))
    out = cfg.out_path
    with outputs(out / LATENT_CSV, out / LATENT_SVG, out / LATENT_JSON):
        write_projection_csv(projection, out / LATENT_CSV)
        plot_projection_svg(projection, out / LATENT_SVG, classes=data.classes,
                            title=f"Latent space ({projection.method})")
        write_json({"method": projection.method, "params": projection.params,
                    "separation_latent": cluster_separation(cloud),
                    "separation_projection": cluster_separation(projection)}, out / LATENT_JSON)


def cmd_classify(cfg: RunConfig) -> None:
    """Train the classifier on the generated dataset and evaluate it on a mixed test split."""
    manifest = scan_manifest(require(cfg.out_path / SYNTHETIC_DIR), strip_suffix=RECONSTRUCTED_SUFFIX)
    train_m, val_m, test_m = stratified_split_by_origin(manifest, cfg.split_spec())
    train_set, val_set, test_set = (load_labeled_images(m, cfg.image_side) for m in (train_m, val_m, test_m))
    clf = train_classifier(train_set, val_set, cfg.classifier_config())
    matrix = confusion(clf, test_set)
    report = metrics_from_confusion(matrix)
    out = cfg.out_path
    with outputs(out / METRICS_JSON, out / METRICS_CSV):
        report.to_csv(out / METRICS_CSV)
        write_json({"split": {"train": train_m.total, "val": val_m.total, "test": test_m.total},
                    "classifier": {"best_epoch": clf.best_epoch, "epochs_run": clf.epochs_run,
                                   "best_val_accuracy": clf.best_accuracy},
                    "confusion": matrix.to_dict(), "metrics": report.to_dict()}, out / METRICS_JSON)


def cmd_compare(cfg: RunConfig) -> None:
    """Train the traditional (reconstruction + KLD) and the proposed (reconstruction + weight decay) objective."""
    runs = {"traditional": cfg.train_config(lambda_wd=0.0, beta_kld=1.0), "proposed": cfg.train_config()}
    data = _load_dataset(cfg, cfg.data_path)
    test = _test_set(cfg)
    labels = [data.classes[i] for i in data.y]
    initial = VaeModel.create(cfg.image_side, cfg.latent_dim, cfg.mode, seed=cfg.module_seed("vae"))
    curves: Dict[str, LossCurve] = {}
    summary: Dict[str, Dict] = {}
    for name, train_cfg in runs.items():
        model, curve = train(initial, data.x, train_cfg)
        curves[name] = curve
        test_loss = _test_loss(model, test)
        summary[name] = {"lambda_wd": train_cfg.lambda_wd, "beta_kld": train_cfg.beta_kld,
                         "final_total": curve.final()["total"], "final": curve.final(), "test_loss": test_loss,
                         "test_total": test_loss["total"] if test_loss else None,
                         "separation": cluster_separation(latent_cloud(model, data.x, labels))}
    out = ensure_writable_dir(cfg.out_path)
    with outputs(out / COMPARISON_CSV, out / COMPARISON_SVG, out / COMPARISON_JSON):
        rows = [[e, a, b] for e, a, b in zip(curves["traditional"].column("epoch").astype(int).tolist(),
                                             curves["traditional"].column("total"), curves["proposed"].column("total"))]
        write_csv(rows, ["epoch", "traditional_total", "proposed_total"], out / COMPARISON_CSV)
        plot_loss_curves(curves, out / COMPARISON_SVG, title="Traditional versus proposed training loss")
        write_json(summary, out / COMPARISON_JSON)


def cmd_interpolate(cfg: RunConfig) -> None:
    """Decode the latent line between the first images of two classes."""
    model = _load_model(cfg)
    data = load_labeled_images(scan_manifest(require(cfg.data_path)), model.image_side)
    class_a = cfg.interp_class_a or data.classes[0]
    class_b = cfg.interp_class_b or data.classes[-1]
    for name in (class_a, class_b):
        if name not in data.classes:
            raise ValueError(f"Unknown interpolation class {name}, the dataset has {', '.join(data.classes)}")
    frames = interpolate_latent(model, data.of_class(class_a)[0, 0], data.of_class(class_b)[0, 0], cfg.interp_steps)
    out = cfg.out_path / INTERPOLATION_DIR
    with outputs(out):
        ensure_writable_dir(out)
        for i, frame in enumerate(frames):
            write_pgm(quantize(frame), out / f"interp_{i}.pgm")


def _newest(paths: List[Path]) -> float:
    return max(p.stat().st_mtime for p in paths)


def _check_fresh(artifact: Path, inputs: List[Path]) -> None:
    if artifact.stat().st_mtime < _newest(inputs):
        raise StaleArtifactError(f"{artifact} is older than its inputs, rerun the command that writes it")


def cmd_report(cfg: RunConfig) -> None:
    """Combine all artifacts in one Markdown report, refusing artifacts older than their inputs."""
    out = cfg.out_path
    data_files = ls(require(cfg.data_path), suffix=".pgm")
    model = require(out / MODEL_FILE)
    artifacts = {name: require(out / name) for name in (TRAIN_SUMMARY, LOSS_SVG, LATENT_JSON, LATENT_SVG,
                                                         METRICS_JSON)}
    generation = require(out / SYNTHETIC_DIR / REPORT_FILE)
    rotation = require(out / ROTATION_DIR / REPORT_FILE)
    _check_fresh(model, data_files)
    _check_fresh(rotation, data_files)
    for artifact in (generation, artifacts[TRAIN_SUMMARY], artifacts[LOSS_SVG], artifacts[LATENT_JSON],
                     artifacts[LATENT_SVG]):
        _check_fresh(artifact, [model])
    _check_fresh(artifacts[METRICS_JSON], [generation])
    comparison = None
    if (out / COMPARISON_JSON).exists():
        _check_fresh(out / COMPARISON_JSON, data_files)
        comparison = read_json(out / COMPARISON_JSON)
    text = format_report(read_json(artifacts[TRAIN_SUMMARY]), read_json(generation), read_json(rotation),
                         read_json(artifacts[LATENT_JSON]), read_json(artifacts[METRICS_JSON]), comparison)
    with outputs(out / REPORT_MD):
        with open(out / REPORT_MD, "w", newline="\n") as f:
            f.write(text)


COMMANDS: Dict[str, Callable[[RunConfig], None]] = {
    "fixture": cmd_fixture,
    "train": cmd_train,
    "generate": cmd_generate,
    "augment": cmd_augment,
    "project": cmd_project,
    "classify": cmd_classify,
    "report": cmd_report,
    "compare": cmd_compare,
    "interpolate": cmd_interpolate,
}
