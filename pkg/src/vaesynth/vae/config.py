from dataclasses import asdict, dataclass

from vaesynth.numcore.optim import DEFAULT_LEARNING_RATE
from vaesynth.numcore.tensor import NumericMode

DEFAULT_LAMBDA_WD = 0.001
DEFAULT_BETA_KLD = 0.01


@dataclass
class TrainConfig:
    """
    Hyper-parameters of a VAE training run.

    Attributes:
        epochs (int): Number of passes over the training set, >= 1.
        batch_size (int): Images per optimizer step, >= 1.
        learning_rate (float): Adam learning rate.
        lambda_wd (float): Weight decay coefficient λ of the λ·Σ param² loss term, >= 0.
        beta_kld (float): Weight of the KL divergence in the training objective, >= 0.
        seed (int): Seed of the shuffle and reparameterization streams.
        mode (NumericMode): Numeric mode the training set is cast to.
    """
    epochs: int = 100
    batch_size: int = 5
    learning_rate: float = DEFAULT_LEARNING_RATE
    lambda_wd: float = DEFAULT_LAMBDA_WD
    beta_kld: float = DEFAULT_BETA_KLD
    seed: int = 0
    mode: NumericMode = NumericMode.STANDARD

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.lambda_wd < 0:
            raise ValueError(f"lambda_wd must be >= 0, got {self.lambda_wd}")
        if self.beta_kld < 0:
            raise ValueError(f"beta_kld must be >= 0, got {self.beta_kld}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d
