"""Cascaded PID baseline.

An outer loop turns the planar velocity error into roll and pitch setpoints,
an inner loop turns the lean error into a ball torque and then into motor
commands through the inverse wheel coupling.

Usage:

```python
from ballbot_nav import pid
from ballbot_nav.dynamics import PhysicalParams

controller = pid.CascadedPid(pid.PidGains(), PhysicalParams(), (0.0, 0.5))
controller.reset()
action = controller.act(observation, state)
```

Tune on flat ground

```python
gains, report = pid.tune_flat(pid.PidConfig())
pid.write_tuning_report(report, "pid_tuning.csv")
```
"""

from ballbot_nav.pid.gains import PidGains, PidConfig
from ballbot_nav.pid.controller import (
    PidController,
    CascadedPid,
    lean_angles,
    torque_to_action,
)
from ballbot_nav.pid.tuning import tune_flat, flat_trial, write_tuning_report
