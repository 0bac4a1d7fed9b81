"""Ballbot rigid-body simulation.

A sphere and a body joined at the ball centre, driven by three omniwheels,
rolling on a `TerrainField`. The default step is 2 ms (500 Hz).

Usage:

```python
from ballbot_nav import dynamics, terrain

field = terrain.generate_terrain(terrain.TerrainParams(amplitude=0.0))
params = dynamics.PhysicalParams()
state = dynamics.rest_state(field, params, tilt_deg=1.0)

for _ in range(100):
    state = dynamics.step(state, dynamics.NEUTRAL_ACTION, field, params)

dynamics.tilt_angle(state)
dynamics.is_failure(state)
```
"""

from ballbot_nav.dynamics.params import PhysicalParams, GRAVITY
from ballbot_nav.dynamics.state import (
    Action,
    BallbotState,
    NEUTRAL_ACTION,
    FAILURE_TILT_DEG,
    clamp_action,
    tilt_angle,
    is_failure,
)
from ballbot_nav.dynamics.drive import (
    coupling_matrix,
    inverse_coupling,
    wheel_torque_map,
    transmitted_torque,
    kinematic_wheel_speeds,
)
from ballbot_nav.dynamics.contact import ContactFrame, compute_contact
from ballbot_nav.dynamics.integrator import (
    DEFAULT_DT,
    StepResult,
    advance,
    step,
    rest_state,
    mechanical_energy,
)
from ballbot_nav.dynamics.trace import StateTrace
