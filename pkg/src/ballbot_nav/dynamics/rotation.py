"""Unit-quaternion helpers. Quaternions are stored as (w, x, y, z)."""

import math

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a ⊗ b"""

    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    """Rotation of `angle` radians about `axis`"""

    axis = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(axis)
    if norm == 0 or angle == 0:
        return IDENTITY.copy()
    axis = axis / norm
    half = 0.5 * angle
    return np.concatenate([[math.cos(half)], math.sin(half) * axis])


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix taking body-frame vectors to world frame"""

    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_integrate(q: np.ndarray, omega_world: np.ndarray, dt: float) -> np.ndarray:
    """Advance q by a constant world-frame angular velocity over dt and renormalise"""

    rate = float(np.linalg.norm(omega_world))
    if rate == 0.0:
        return q / np.linalg.norm(q)
    dq = quat_from_axis_angle(omega_world, rate * dt)
    q_new = quat_multiply(dq, q)
    return q_new / np.linalg.norm(q_new)


def tilt_radians(q: np.ndarray) -> float:
    """Angle between the body z axis and the world z axis"""

    w, x, y, z = q
    return 2.0 * math.atan2(math.sqrt(x * x + y * y), math.sqrt(w * w + z * z))


def roll_pitch_yaw(q: np.ndarray) -> np.ndarray:
    """Z-Y-X Euler angles (roll, pitch, yaw) in radians"""

    w, x, y, z = q
    roll = math.atan2(2 * (w * x + y * z), 1 - 2 * (x * x + y * y))
    pitch = math.asin(max(-1.0, min(1.0, 2 * (w * y - z * x))))
    yaw = math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z))
    return np.array([roll, pitch, yaw])


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]x such that [v]x @ u == v x u"""

    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
