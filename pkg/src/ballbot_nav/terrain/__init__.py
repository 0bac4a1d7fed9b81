"""Procedural uneven terrain.

Terrains are heightfields sampled from fractal 2-D simplex noise. A field is
fully determined by its `TerrainParams`, including the seed, and answers
continuous height, gradient and normal queries.

Usage:

```python
from ballbot_nav import terrain

field = terrain.generate_terrain(terrain.TerrainParams(seed=42))
terrain.height(field, 1.3, -2.7)
terrain.surface_normal(field, 1.3, -2.7)
```

Setting `amplitude=0` gives flat ground.

Export a raster for plotting

```python
terrain.export_csv(field, "terrain.csv", extent=20.0, resolution=256)
terrain.export_heightmap(field, "terrain.png", extent=20.0, resolution=256)
```
"""

from ballbot_nav.terrain.field import (
    TerrainParams,
    TerrainField,
    generate_terrain,
    height,
    gradient,
    surface_normal,
    flattest_point,
)
from ballbot_nav.terrain.export import (
    rasterize,
    raster_frame,
    export_csv,
    export_heightmap,
)
