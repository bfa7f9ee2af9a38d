"""Random smooth time-like test curves from bounded Fourier tangent data."""

import numpy as np
import sympy as sp

from lorentz_frames.curves import tangent_field_spec
from lorentz_frames.expressions import SymbolicVector


def random_fourier_tangent_spec(rng, name="random", modes=3, amplitude=0.4,
                                domain=(0.0, 1.0)):
    """Unit time-like tangent field T = (sqrt(1 + |w|^2), w) with w a
    low-frequency Fourier sum; amplitudes decay like 1/k^2 so RK4 drift at
    step 1e-3 stays far below 1e-8."""
    s = sp.Symbol("s", real=True)
    w = []
    for _ in range(3):
        expr = sp.Integer(0)
        for k in range(1, modes + 1):
            a, b = rng.uniform(-amplitude, amplitude, 2) / k ** 2
            expr += sp.Float(a) * sp.cos(k * sp.pi * s) + sp.Float(b) * sp.sin(k * sp.pi * s)
        w.append(expr)
    t0 = sp.sqrt(1 + w[0] ** 2 + w[1] ** 2 + w[2] ** 2)
    field = SymbolicVector([t0, w[0], w[1], w[2]], s)
    return tangent_field_spec(name, field, domain)


def random_timelike_vector(rng, scale=2.0):
    space = rng.uniform(-scale, scale, 3)
    t = np.sqrt(1.0 + space @ space) * (1.0 + rng.uniform(0.1, 1.0))
    return np.array([t * rng.choice([-1.0, 1.0]), *space])
