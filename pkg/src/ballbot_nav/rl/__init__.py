"""Reinforcement learning for ballbot navigation.

Reward, environment, rollout collection over parallel environments,
generalised advantage estimation, clipped-surrogate updates, the training
loop and depth-encoder pretraining.

Usage:

```python
from ballbot_nav import rl
from ballbot_nav.runconfig import load_config

config = load_config("run.yaml")
metrics = rl.train(config, "runs/seed0")
```

Lower-level pieces

```python
advantages, returns = rl.gae(rewards, values, dones, gamma=0.99, lam=0.95)
buffer = rl.collect_rollouts(envs, model, config.ppo, rng)
stats = rl.ppo_update(model, optimizer, buffer, config.ppo, rng)
```
"""

from ballbot_nav.rl.reward import RewardParams, reward, velocity_reward
from ballbot_nav.rl.buffer import RolloutBuffer, gae
from ballbot_nav.rl.env import BallbotEnv, EnvStep, TRAIN_HORIZON
from ballbot_nav.rl.schedule import LinearMilestoneSchedule
from ballbot_nav.rl.ppo import PpoConfig, PpoStats, ppo_update, surrogate_grad
from ballbot_nav.rl.rollout import (
    Controller,
    EpisodeResult,
    collect_rollouts,
    run_episode,
)
from ballbot_nav.rl.trainer import (
    METRICS_COLUMNS,
    build_model,
    make_envs,
    train,
    save_training_checkpoint,
    load_training_checkpoint,
)
from ballbot_nav.rl.pretrain import (
    EncoderConfig,
    collect_depth_dataset,
    fit_autoencoder,
    pretrain_encoder,
)
