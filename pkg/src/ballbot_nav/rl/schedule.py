"""Learning-rate schedule"""

from dataclasses import dataclass

from ballbot_nav.config import ConfigError


@dataclass(frozen=True)
class LinearMilestoneSchedule:
    """Step-wise constant learning rate divided by `factor` at each milestone.

    With the defaults the rate is 1e-4 until 3e6 environment steps, 1e-4 / 3
    until 6e6, and 1e-4 / 9 afterwards.
    """

    initial: float = 1e-4
    milestones: tuple[int, ...] = (3_000_000, 6_000_000)
    factor: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "milestones", tuple(map(int, self.milestones)))
        if not self.initial > 0:
            raise ConfigError(f"learning rate must be > 0, got {self.initial}")
        if not self.factor >= 1:
            raise ConfigError(f"lr factor must be >= 1, got {self.factor}")
        if list(self.milestones) != sorted(self.milestones):
            raise ConfigError("lr milestones must be increasing")

    def __call__(self, total_steps: int) -> float:
        passed = sum(total_steps >= m for m in self.milestones)
        return self.initial / self.factor**passed
