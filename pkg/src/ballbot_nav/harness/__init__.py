"""Experiment protocols and their CSV outputs.

Evaluate a trained policy on held-out terrains

```python
from ballbot_nav import harness
from ballbot_nav.runconfig import load_config

config = load_config("run.yaml")
policy = harness.PolicyController(harness.load_policy("latest.ckpt", config))
episodes = harness.evaluate(policy, config)
harness.summarize(episodes)
```

Compare against the PID and scan the horizon

```python
rows, table = harness.pid_comparison(policy, harness.pid_controller(config), config)
rows, table, fit = harness.horizon_scaling(policy, config)
```

Check how hard the terrain is for the PID at a few relief heights

```python
harness.terrain_difficulty(harness.pid_controller(config), config, (0.15, 0.35))
```

The same protocols are available from the `ballbot-nav` command line.
"""

from ballbot_nav.harness.controllers import (
    PolicyController,
    controller_rig,
    load_policy,
    pid_controller,
)
from ballbot_nav.harness.evaluation import (
    EPISODE_COLUMNS,
    evaluate,
    evaluate_policy,
    summarize,
    write_episodes,
)
from ballbot_nav.harness.experiments import (
    horizon_scaling,
    linear_fit,
    pid_comparison,
    terrain_difficulty,
)
from ballbot_nav.harness.trajectory import (
    TRAJECTORY_COLUMNS,
    export_trajectory,
    record_trajectory,
)
