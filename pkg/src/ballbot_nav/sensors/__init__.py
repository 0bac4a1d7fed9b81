"""Simulated exteroception and observation assembly.

Two depth cameras on the body look at the ball-ground contact point and tick
at about 80 Hz, slower than the 500 Hz control loop. Each control step
observes the latest frames' embeddings and their age.

Usage:

```python
from ballbot_nav import sensors

rig = sensors.DepthCameraRig(resolution=32)
frame = sensors.render_depth(state, field, rig, camera_index=0)
sensors.save_depth_png(frame, "depth.png")

obs = sensors.assemble_observation(state, last_action, z1, z2, frame_age)
len(obs)  # 56
```
"""

from ballbot_nav.sensors.camera import (
    DepthCameraRig,
    DepthFrame,
    cast_rays,
    render_depth,
    save_depth_png,
)
from ballbot_nav.sensors.clock import CameraClock, sample_clock
from ballbot_nav.sensors.observation import (
    EMBEDDING_DIM,
    FULL_DIM,
    PROPRIO_DIM,
    OBSERVATION_LAYOUT,
    Observation,
    assemble_observation,
    layout_signature,
    observation_dim,
    field_slice,
)
from ballbot_nav.sensors.exteroception import Exteroception
