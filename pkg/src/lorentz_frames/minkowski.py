"""Linear algebra on R^4 with the indefinite metric diag(-1, 1, 1, 1).

Vectors are plain numpy arrays of shape (4,) with the time component first.
All functions are pure and also accept stacked arrays of shape (..., 4)
where that makes sense.
"""

import enum
import math

import numpy as np

from .errors import DegenerateInput, WrongCharacter

#: Diagonal of the metric, time component first.
ETA_DIAG = np.array([-1.0, 1.0, 1.0, 1.0])

#: The metric as a matrix.
ETA = np.diag(ETA_DIAG)

#: Relative width of the numerical light cone used by causal_character.
LIGHT_CONE_TOL = 1e-12


class CausalCharacter(enum.Enum):
    TIME_LIKE = "time-like"
    SPACE_LIKE = "space-like"
    LIGHT_LIKE = "light-like"


def inner(u, v):
    """Indefinite inner product -u0*v0 + u1*v1 + u2*v2 + u3*v3."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.sum(u * v * ETA_DIAG, axis=-1)


def norm(v):
    """sqrt(|<v, v>|); zero exactly for zero and light-like vectors."""
    return np.sqrt(np.abs(inner(v, v)))


def causal_character(v, tol=LIGHT_CONE_TOL):
    """Classify a single vector as time-, space- or light-like.

    The light cone is thickened to |<v,v>| <= tol * max(1, |v|^2_euclid)
    so that roundoff near the cone maps to LIGHT_LIKE deterministically.
    The zero vector is space-like.
    """
    v = np.asarray(v, dtype=float)
    q = float(inner(v, v))
    e2 = float(np.dot(v, v))
    if e2 <= tol:
        return CausalCharacter.SPACE_LIKE
    if abs(q) <= tol * max(1.0, e2):
        return CausalCharacter.LIGHT_LIKE
    return CausalCharacter.TIME_LIKE if q < 0.0 else CausalCharacter.SPACE_LIKE


def lorentz_gram_schmidt(vectors, time_index, tol=1e-12):
    """Orthonormalize four independent vectors against the indefinite metric.

    Runs modified Gram-Schmidt in input order, normalizing after every
    projection. The output row at position `time_index` is a unit time-like
    vector (<e,e> = -1), every other row is unit space-like, and the first
    output is the normalization of the first input.

    Raises DegenerateInput when a projected vector is light-like or zero
    within tolerance, and WrongCharacter when the causal characters do not
    land as requested.
    """
    vecs = [np.array(v, dtype=float) for v in vectors]
    if len(vecs) != 4:
        raise ValueError("expected exactly four vectors")
    if not 0 <= int(time_index) <= 3:
        raise ValueError("time_index must be in 0..3")
    out = []
    signs = []
    for k, v in enumerate(vecs):
        w = v.copy()
        for e, sign in zip(out, signs):
            # <e,e> = sign, so the projection coefficient is sign * <w,e>.
            w = w - sign * float(inner(w, e)) * e
        q = float(inner(w, w))
        scale = max(1.0, float(np.dot(w, w)))
        if abs(q) <= tol * scale:
            raise DegenerateInput(
                f"vector {k} projects to a light-like or zero vector (<w,w> = {q:.3e})"
            )
        sign = -1.0 if q < 0.0 else 1.0
        if (sign < 0.0) != (k == time_index):
            raise WrongCharacter(
                f"vector {k} normalizes to a {'time' if sign < 0 else 'space'}-like "
                f"unit but position {time_index} is the time slot"
            )
        out.append(w / math.sqrt(abs(q)))
        signs.append(sign)
    return np.stack(out)


def gram_matrix(rows):
    """Z eta Z^T for stacked row vectors Z."""
    z = np.asarray(rows, dtype=float)
    return (z * ETA_DIAG) @ z.T


def is_lorentz_orthonormal(rows, tol):
    """True iff max |Z eta Z^T - eta| <= tol for the stacked rows Z."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.max(np.abs(gram_matrix(rows) - ETA)) <= tol)


def frame_defect(rows, signature=ETA_DIAG):
    """Max-entry deviation of Z eta Z^T from diag(signature)."""
    z = np.asarray(rows, dtype=float)
    return float(np.max(np.abs((z * ETA_DIAG) @ z.T - np.diag(signature))))


def lorentz_inverse(rows):
    """Inverse of a Lorentz-orthonormal matrix via eta Z^T eta (exact when Z eta Z^T = eta)."""
    z = np.asarray(rows, dtype=float)
    return ETA_DIAG[:, None] * z.T * ETA_DIAG[None, :]


def lorentz_cross(a, b, c):
    """The vector x with <x, w> = det[a; b; c; w] for every w.

    For an orthonormal triple (a, b, c) of characters (-,+,+) this returns
    the unit space-like completion with det[a; b; c; x] = +1.
    """
    m = np.stack([np.asarray(a, float), np.asarray(b, float), np.asarray(c, float)])
    cof = np.empty(4)
    cols = np.arange(4)
    for j in range(4):
        minor = m[:, cols != j]
        cof[j] = (-1.0) ** (3 + j) * np.linalg.det(minor)
    return ETA_DIAG * cof
