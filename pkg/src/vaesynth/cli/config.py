import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Sequence

from vaesynth.evalkit.classifier import ClassifierConfig
from vaesynth.evalkit.split import SplitSpec
from vaesynth.numcore.rng import derive_seed
from vaesynth.numcore.tensor import NumericMode
from vaesynth.synthgen.fixture import FixtureSpec
from vaesynth.vae.config import DEFAULT_BETA_KLD, TrainConfig

SEED_ENV = "VAESYNTH_SEED"
PROJECTIONS = ("pca", "tsne")


class MissingInputError(ValueError):
    """Raised when an input artifact a command needs does not exist."""

    def __init__(self, path: Path, what: str = "input"):
        super().__init__(f"Missing {what}: {path}")
        self.path = Path(path)


@dataclass
class RunConfig:
    """
    Every tunable of a pipeline run, flat so it maps one to one on a JSON object.

    Empty `data_dir` and `test_dir` resolve to ``<out_dir>/fixture`` and ``<out_dir>/fixture_test``;
    empty interpolation classes resolve to the first and the last class of the dataset.
    """
    seed: int = 0
    out_dir: str = "run"
    data_dir: str = ""
    test_dir: str = ""
    image_side: int = 64
    latent_dim: int = 32
    numeric_mode: str = "32"
    epochs: int = 100
    batch_size: int = 5
    learning_rate: float = 0.001
    lambda_wd: float = 0.001
    beta_kld: float = DEFAULT_BETA_KLD
    n_per_class: int = 10
    n_test_per_class: int = 2
    noise_amplitude: float = 0.05
    num_images_per_sample: int = 9
    max_degrees: float = 30.0
    split_train: float = 0.8
    split_val: float = 0.1
    split_test: float = 0.1
    projection: str = "tsne"
    perplexity: float = 10.0
    tsne_iterations: int = 500
    classifier_hidden: int = 64
    classifier_learning_rate: float = 0.001
    classifier_batch_size: int = 32
    classifier_max_epochs: int = 200
    classifier_patience: int = 10
    interp_class_a: str = ""
    interp_class_b: str = ""
    interp_steps: int = 8

    def __post_init__(self):
        if self.numeric_mode not in {m.value for m in NumericMode}:
            raise ValueError(f"numeric_mode must be 32 or 64, got {self.numeric_mode}")
        if self.projection not in PROJECTIONS:
            raise ValueError(f"projection must be one of {', '.join(PROJECTIONS)}, got {self.projection}")
        if not self.out_dir:
            raise ValueError("out_dir must not be empty")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'RunConfig':
        """
        Build a configuration from a mapping of keys to values; strings are converted to the type of the key.

        :raises ValueError: On an unknown key or a value of the wrong type.
        """
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, value in data.items():
            if key not in types:
                raise ValueError(f"Invalid key in configuration: {key}")
            values[key] = _coerce(key, value, types[key])
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def mode(self) -> NumericMode:
        return NumericMode(self.numeric_mode)

    @property
    def out_path(self) -> Path:
        return Path(self.out_dir)

    @property
    def data_path(self) -> Path:
        return Path(self.data_dir) if self.data_dir else self.out_path / "fixture"

    @property
    def test_path(self) -> Path:
        return Path(self.test_dir) if self.test_dir else self.out_path / "fixture_test"

    def module_seed(self, name: str) -> int:
        """Seed of a pipeline stage, derived from the master seed and the stage name."""
        return derive_seed(self.seed, name)

    def fixture_spec(self, test: bool = False) -> FixtureSpec:
        return FixtureSpec(n_per_class=self.n_test_per_class if test else self.n_per_class,
                           image_side=self.image_side, noise_amplitude=self.noise_amplitude,
                           seed=self.module_seed("fixture"))

    def train_config(self, **changes) -> TrainConfig:
        values = dict(epochs=self.epochs, batch_size=self.batch_size, learning_rate=self.learning_rate,
                      lambda_wd=self.lambda_wd, beta_kld=self.beta_kld, seed=self.module_seed("vae"), mode=self.mode)
        values.update(changes)
        return TrainConfig(**values)

    def split_spec(self) -> SplitSpec:
        return SplitSpec(self.split_train, self.split_val, self.split_test, seed=self.module_seed("evalkit"))

    def classifier_config(self) -> ClassifierConfig:
        return ClassifierConfig(hidden=self.classifier_hidden, learning_rate=self.classifier_learning_rate,
                                batch_size=self.classifier_batch_size, max_epochs=self.classifier_max_epochs,
                                patience=self.classifier_patience, seed=self.module_seed("evalkit"), mode=self.mode)


def _coerce(key: str, value: Any, kind: type) -> Any:
    if isinstance(value, str) and kind is not str:
        try:
            return kind(value)
        except ValueError:
            raise ValueError(f"Invalid value for {key}: {value!r} is not a {kind.__name__}") from None
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ValueError(f"Invalid value for {key}: {value!r} is not an int")
    if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise ValueError(f"Invalid value for {key}: {value!r} is not a float")
    if kind is str and not isinstance(value, str):
        raise ValueError(f"Invalid value for {key}: {value!r} is not a string")
    return kind(value)


def read_config_file(path: Path) -> Dict[str, Any]:
    """
    Read a JSON configuration file holding one flat object.

    :raises MissingInputError: If the file does not exist.
    :raises ValueError: If the file is not a JSON object.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(path, "configuration file")
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"Configuration file {path} must hold a JSON object")
    return data


def parse_overrides(overrides: Sequence[str]) -> Dict[str, str]:
    """Split ``key=value`` arguments."""
    values = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"Override must look like key=value, got {item!r}")
        values[key.strip()] = value
    return values


def resolve_config(config_path: Path | None = None, overrides: Sequence[str] = (), out_dir: str | None = None,
                   seed: int | None = None, environ: Mapping[str, str] | None = None) -> RunConfig:
    """
    Merge every configuration source, lowest precedence first:
    defaults, the VAESYNTH_SEED environment variable, the config file, key=value overrides, --out and --seed.
    """
    values: Dict[str, Any] = {}
    environ = environ if environ is not None else {}
    if environ.get(SEED_ENV):
        values["seed"] = environ[SEED_ENV]
    if config_path is not None:
        values.update(read_config_file(config_path))
    values.update(parse_overrides(overrides))
    if out_dir is not None:
        values["out_dir"] = out_dir
    if seed is not None:
        values["seed"] = seed
    return RunConfig.from_dict(values)
