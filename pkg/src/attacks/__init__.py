"""PGD adversary and severity sweeps."""

from src.attacks.pgd import PgdConfig, pgd_attack, pgd_attack_batch
from src.attacks.sweep import (
    SweepRow,
    DEFAULT_EPSILON_FRACTIONS,
    default_epsilon_grid,
    epsilon_sweep,
    epsilon_sweep_many,
    count_accuracy_violations
)

__all__ = [
    "PgdConfig",
    "pgd_attack",
    "pgd_attack_batch",
    "SweepRow",
    "DEFAULT_EPSILON_FRACTIONS",
    "default_epsilon_grid",
    "epsilon_sweep",
    "epsilon_sweep_many",
    "count_accuracy_violations"
]
