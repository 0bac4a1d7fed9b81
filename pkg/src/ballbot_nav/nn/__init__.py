"""Small numpy network stack: layers with explicit backward passes, the depth
encoder, policy and value MLPs, Adam and a versioned checkpoint format.

Usage:

```python
import numpy as np
from ballbot_nav import nn

model = nn.ActorCritic(obs_dim=15, seed=0)
action, u, log_prob, value = model.act(obs_batch, np.random.default_rng(0))
model.save("policy.ckpt")
model = nn.ActorCritic.load("policy.ckpt")
```
"""

from ballbot_nav.nn.store import Parameter, ParameterStore
from ballbot_nav.nn.layers import (
    BatchNorm,
    Conv2d,
    Flatten,
    Layer,
    LeakyReLU,
    Linear,
    Sequential,
    Sigmoid,
    Tanh,
    Unflatten,
    Upsample2x,
    sigmoid,
)
from ballbot_nav.nn.init import orthogonal_
from ballbot_nav.nn.distributions import SquashedGaussian
from ballbot_nav.nn.networks import (
    ActorCritic,
    Decoder,
    Encoder,
    Policy,
    Value,
    encoder_feature_size,
)
from ballbot_nav.nn.optim import Adam, clip_grad_norm
from ballbot_nav.nn.checkpoint import (
    FORMAT_VERSION,
    load_checkpoint,
    load_store,
    save_checkpoint,
    save_store,
)
from ballbot_nav.nn.gradcheck import check_layer_gradients, numerical_gradient
