"""Frame paths, coefficient matrices, and the sparsity-pattern taxonomy.

A frame is a 4x4 array of row vectors {T, Z1, Z2, Z3} with Z eta Z^T = eta.
Its coefficient matrix X (defined by Z' = X Z) is Lorentz-skew: the first
row and column agree, the spatial block is antisymmetric, the diagonal is
zero.  X is therefore determined by its six strictly upper entries.

Admissible sparsity patterns have at most three nonzero strictly upper
entries and no zero column once mirrored.  Viewing the upper positions as
edges of the complete graph on {0, 1, 2, 3}, the admissible three-entry
patterns are exactly the 16 spanning trees, and the permutation group on
the normal indices {1, 2, 3} splits them into four orbits:

* B - the star at the tangent vertex (orbit size 1),
* D - a star at a normal vertex (orbit size 3),
* F - a path with the tangent vertex at an end (orbit size 6, Frenet chain),
* C - a path with the tangent vertex in the interior (orbit size 6).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NotTypeC, TangentMismatch
from .minkowski import ETA, ETA_DIAG, frame_defect, lorentz_inverse
from .numdiff import grid_derivative

#: Default relative threshold below which a coefficient entry counts as zero.
PATTERN_TOL = 1e-5

_UPPER = tuple((i, j) for i in range(4) for j in range(i + 1, 4))


class FrameLabel(enum.Enum):
    B = "B"
    C = "C"
    D = "D"
    F = "F"
    NON_GB = "NonGB"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PatternInfo:
    """One admissible pattern: ordered positions carry symbols x1, x2, x3."""

    label: FrameLabel
    positions: tuple  # ordered (i, j) pairs, i < j

    @property
    def pattern(self):
        return frozenset(self.positions)


# The canonical table, grouped F, C, D, B; the first entry of each group is
# the orbit representative.  Position order encodes which entry carries x1,
# x2, x3 in the printed table.
CANONICAL_PATTERNS = (
    PatternInfo(FrameLabel.F, ((0, 1), (1, 2), (2, 3))),
    PatternInfo(FrameLabel.F, ((0, 3), (1, 2), (1, 3))),
    PatternInfo(FrameLabel.F, ((0, 3), (1, 2), (2, 3))),
    PatternInfo(FrameLabel.F, ((0, 1), (1, 3), (2, 3))),
    PatternInfo(FrameLabel.F, ((0, 2), (1, 2), (1, 3))),
    PatternInfo(FrameLabel.F, ((0, 2), (1, 3), (2, 3))),
    PatternInfo(FrameLabel.C, ((0, 1), (0, 2), (1, 3))),
    PatternInfo(FrameLabel.C, ((0, 1), (0, 2), (2, 3))),
    PatternInfo(FrameLabel.C, ((0, 1), (0, 3), (2, 3))),
    PatternInfo(FrameLabel.C, ((0, 1), (0, 3), (1, 2))),
    PatternInfo(FrameLabel.C, ((0, 2), (0, 3), (1, 2))),
    PatternInfo(FrameLabel.C, ((0, 2), (0, 3), (1, 3))),
    PatternInfo(FrameLabel.D, ((0, 1), (1, 2), (1, 3))),
    PatternInfo(FrameLabel.D, ((0, 2), (1, 2), (2, 3))),
    PatternInfo(FrameLabel.D, ((0, 3), (1, 3), (2, 3))),
    PatternInfo(FrameLabel.B, ((0, 1), (0, 2), (0, 3))),
)

REPRESENTATIVES = {
    FrameLabel.B: frozenset({(0, 1), (0, 2), (0, 3)}),
    FrameLabel.D: frozenset({(0, 1), (1, 2), (1, 3)}),
    FrameLabel.C: frozenset({(0, 1), (0, 2), (1, 3)}),
    FrameLabel.F: frozenset({(0, 1), (1, 2), (2, 3)}),
}

# Tie-break order for degenerate patterns contained in several templates.
# B first keeps the all-zero matrix a Bishop matrix; D before C keeps the
# type-D construction classified D when its third coefficient vanishes.
_PREFERENCE = (FrameLabel.B, FrameLabel.D, FrameLabel.C, FrameLabel.F)

_PERMS = tuple(itertools.permutations((1, 2, 3)))


@dataclass(frozen=True)
class Classification:
    """Result of pattern classification."""

    label: FrameLabel
    pattern: frozenset = frozenset()
    representative: frozenset = frozenset()
    permutation: tuple = (1, 2, 3)      # row relabeling onto the representative
    positivity: object = None           # for F: are the two chain entries positive
    node_labels: list = None            # per-node labels when the path is NonGB
    note: str = ""

    def __str__(self):
        if self.label is FrameLabel.F and self.positivity is not None:
            return f"F (positivity: {'yes' if self.positivity else 'no'})"
        return str(self.label)


@dataclass
class FramePath:
    """Lorentz-orthonormal frames sampled on a uniform proper-time grid."""

    grid: np.ndarray           # (N,)
    frames: np.ndarray         # (N, 4, 4), rows T, Z1, Z2, Z3
    curve: object = None       # ProperTimeCurve or None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.frames = np.asarray(self.frames, dtype=float)
        if self.frames.shape != (len(self.grid), 4, 4):
            raise ValueError("frames must have shape (len(grid), 4, 4)")

    def __len__(self):
        return len(self.grid)

    @property
    def step(self):
        return float(self.grid[1] - self.grid[0])

    def drift(self):
        """Max node deviation of Z eta Z^T from eta."""
        g = np.einsum("nij,j,nkj->nik", self.frames, ETA_DIAG, self.frames)
        return float(np.max(np.abs(g - ETA)))

    def tangent_defect(self):
        """Max deviation of row 0 from the curve tangent (0 when no curve attached)."""
        if self.curve is None:
            return 0.0
        t = self.curve.tangent(self.grid)
        return float(np.max(np.abs(self.frames[:, 0, :] - t)))


def permutation_matrix(perm):
    """4x4 matrix P with (P Z) placing old normal row perm[k-1] in slot k."""
    p = np.zeros((4, 4))
    p[0, 0] = 1.0
    for new_slot, old_row in enumerate(perm, start=1):
        p[new_slot, old_row] = 1.0
    return p


def apply_permutation_to_pattern(pattern, perm):
    """Image of a sparsity pattern under reordering rows 1..3 by perm."""
    slot_of = {old: new for new, old in enumerate(perm, start=1)}
    slot_of[0] = 0
    return frozenset(tuple(sorted((slot_of[i], slot_of[j]))) for i, j in pattern)


def permute_frame(path, perm):
    """Reorder the normal rows of every frame: new row k is old row perm[k-1]."""
    if sorted(perm) != [1, 2, 3]:
        raise ValueError("perm must be a permutation of (1, 2, 3)")
    frames = path.frames[:, (0,) + tuple(perm), :]
    return FramePath(grid=path.grid.copy(), frames=frames, curve=path.curve)


def coefficient_from_upper(values):
    """Rebuild the full Lorentz-skew matrix from {(i,j): value} upper entries."""
    x = np.zeros((4, 4))
    for (i, j), v in values.items():
        if not (0 <= i < j <= 3):
            raise ValueError(f"not a strictly upper position: {(i, j)}")
        x[i, j] = v
        x[j, i] = v if i == 0 else -v
    return x


def skew_project(x):
    """Project onto the Lorentz-skew subspace and zero the diagonal."""
    x = np.asarray(x, dtype=float)
    xt = np.swapaxes(x, -1, -2)
    p = 0.5 * (x - ETA_DIAG[:, None] * xt * ETA_DIAG[None, :])
    idx = np.arange(4)
    p[..., idx, idx] = 0.0
    return p


def _raw_coefficients(path):
    dz = grid_derivative(path.frames, path.step)
    zinv = np.stack([lorentz_inverse(z) for z in path.frames])
    return np.einsum("nij,njk->nik", dz, zinv)


def extract_coefficients(path, project=True):
    """Coefficient matrices X with Z' = X Z at every node (grid derivative)."""
    x = _raw_coefficients(path)
    return skew_project(x) if project else x


def extract_coefficient(path, node, project=True):
    """Coefficient matrix at one node."""
    if not -len(path) <= node < len(path):
        raise IndexError("node out of range")
    return extract_coefficients(path, project=project)[node]


def skewness_defect(path):
    """Max |X eta + eta X^T| over the path before projection."""
    x = _raw_coefficients(path)
    res = x * ETA_DIAG[None, None, :] + ETA_DIAG[None, :, None] * np.swapaxes(x, 1, 2)
    return float(np.max(np.abs(res)))


def _upper_values(x):
    return {pos: x[pos] for pos in _UPPER}


def _match_pattern(pattern):
    """Map a sparsity pattern onto an orbit representative.

    Exact matches win; a proper subset of several templates resolves by the
    preference order B, D, C, F.  Returns (label, representative, perm) or
    None when the pattern embeds in no admissible template.
    """
    if not pattern:
        return FrameLabel.B, REPRESENTATIVES[FrameLabel.B], (1, 2, 3)
    exact, subset = None, None
    for label in _PREFERENCE:
        rep = REPRESENTATIVES[label]
        for perm in _PERMS:
            mapped = apply_permutation_to_pattern(pattern, perm)
            if mapped == rep and exact is None:
                exact = (label, rep, perm)
            elif mapped < rep and subset is None:
                subset = (label, rep, perm)
        if exact:
            return exact
    return exact or subset


def classify_pattern(x, tol=PATTERN_TOL):
    """Classify a single coefficient matrix by its thresholded sparsity."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=float)
    vals = _upper_values(x)
    scale = max(abs(v) for v in vals.values())
    if scale == 0.0:
        return Classification(label=FrameLabel.B, note="all coefficients vanish")
    pattern = frozenset(pos for pos, v in vals.items() if abs(v) > tol * scale)
    return _classify_from_pattern(pattern, [x], tol)


def _classify_from_pattern(pattern, mats, tol, node_labels=None):
    if len(pattern) > 3:
        return Classification(label=FrameLabel.NON_GB, pattern=pattern,
                              node_labels=node_labels,
                              note=f"{len(pattern)} nonzero upper entries")
    hit = _match_pattern(pattern)
    if hit is None:
        return Classification(label=FrameLabel.NON_GB, pattern=pattern,
                              node_labels=node_labels,
                              note="pattern has a zero column (not a spanning shape)")
    label, rep, perm = hit
    positivity = None
    if label is FrameLabel.F:
        p = permutation_matrix(perm)
        rot = np.einsum("ij,njk,lk->nil", p, np.asarray(mats), p)
        # Frenet-shaped frames need the first two chain entries positive.
        positivity = bool(np.min(rot[:, 0, 1]) > 0.0 and np.min(rot[:, 1, 2]) > 0.0)
    return Classification(label=label, pattern=pattern, representative=rep,
                          permutation=perm, positivity=positivity,
                          node_labels=node_labels)


def classify_path(path_or_coeffs, tol=PATTERN_TOL):
    """Classify a frame path by the union of nodewise sparsity patterns.

    An entry counts as nonzero when it exceeds tol times the largest entry
    anywhere on the path, so the classification reflects the coefficient
    functions globally.  When the union pattern is inadmissible the result
    is NonGB and carries nodewise labels as a diagnostic.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(path_or_coeffs, FramePath):
        coeffs = extract_coefficients(path_or_coeffs)
    else:
        coeffs = np.asarray(path_or_coeffs, dtype=float)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
    upper = np.stack([np.abs(coeffs[:, i, j]) for i, j in _UPPER], axis=1)  # (N, 6)
    scale = float(np.max(upper))
    if scale == 0.0:
        return Classification(label=FrameLabel.B, note="all coefficients vanish")
    flags = np.max(upper, axis=0) > tol * scale
    pattern = frozenset(pos for pos, f in zip(_UPPER, flags) if f)
    result = _classify_from_pattern(pattern, coeffs, tol)
    if result.label is FrameLabel.NON_GB:
        node_labels = [classify_pattern(x, tol).label for x in coeffs]
        result = Classification(label=FrameLabel.NON_GB, pattern=pattern,
                                node_labels=node_labels, note=result.note)
    return result


def enumerate_patterns():
    """The sixteen admissible patterns in canonical table order."""
    return list(CANONICAL_PATTERNS)


def admissible_patterns_bruteforce():
    """All upper-triangle subsets with exactly three entries and no zero column.

    Used as an independent cross-check of the canonical table: mirrored into
    a full matrix, a three-entry pattern misses a column exactly when its
    edges form a triangle, so the admissible ones are the spanning trees.
    """
    out = []
    for bits in itertools.product((0, 1), repeat=6):
        chosen = frozenset(pos for pos, b in zip(_UPPER, bits) if b)
        if len(chosen) != 3:
            continue
        covered = set()
        for i, j in chosen:
            covered |= {i, j}
        if covered == {0, 1, 2, 3}:
            out.append(chosen)
    return out


def verify_type_c_characterization(path, tol=PATTERN_TOL):
    """Check the reordered-chain characterization of a type-C path.

    The distinguished normal (the one whose derivative is proportional to T)
    is moved in front of the tangent; the reordered path must have a chain
    coefficient matrix, nonzero only at positions (0,1), (1,2), (2,3) and
    their mirrors.  Entry signs are reported, not judged.
    """
    coeffs = extract_coefficients(path)
    cls = classify_path(coeffs, tol)
    if cls.label is FrameLabel.B and not cls.pattern:
        # all coefficients vanish: the zero matrix matches the chain shape
        return TypeCCheck(ok=True, max_off_pattern=0.0, signs={},
                          symmetric_pairs={}, frame_defect=path.drift())
    if cls.label is not FrameLabel.C:
        raise NotTypeC(f"path classifies as {cls.label}, not C")
    # Rows permuted onto the C representative: coefficient (0,1)=c1, (0,2)=c2,
    # (1,3)=c3, and the distinguished normal is slot 2.  Reorder to
    # (Z2, T, Z1, Z3).
    ordered = permute_frame(path, cls.permutation)
    reordered = ordered.frames[:, (2, 0, 1, 3), :]
    signature = np.array([1.0, -1.0, 1.0, 1.0])
    h = ordered.step
    dz = grid_derivative(reordered, h)
    # rows satisfy Z eta Z^T = diag(signature), so Z^-1 = eta Z^T diag(signature)
    zinv = np.stack([ETA_DIAG[:, None] * z.T * signature[None, :] for z in reordered])
    x = np.einsum("nij,njk->nik", dz, zinv)
    chain = {(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)}
    mask = np.ones((4, 4), dtype=bool)
    for pos in chain:
        mask[pos] = False
    np.fill_diagonal(mask, False)
    scale = max(float(np.max(np.abs(x))), 1e-300)
    off = float(np.max(np.abs(x[:, mask])))
    ok = off <= tol * scale
    mid = len(path) // 2
    signs = {pos: float(np.sign(x[mid][pos])) for pos in sorted(chain)}
    sym = {pos: bool(np.allclose(x[:, pos[0], pos[1]], x[:, pos[1], pos[0]],
                                 atol=tol * scale))
           for pos in ((0, 1), (1, 2), (2, 3))}
    return TypeCCheck(ok=ok, max_off_pattern=off / scale, signs=signs,
                      symmetric_pairs=sym, frame_defect=max(
                          frame_defect(z, signature) for z in reordered[:: max(1, len(path) // 16)]))


@dataclass(frozen=True)
class TypeCCheck:
    ok: bool
    max_off_pattern: float
    signs: dict
    symmetric_pairs: dict
    frame_defect: float

    def __bool__(self):
        return self.ok


def transformation_matrices(path0, path1, tol=1e-8):
    """Nodewise G = Z1 Z0^-1 relating two frame paths of the same curve."""
    if len(path0) != len(path1) or not np.allclose(path0.grid, path1.grid,
                                                   rtol=0.0, atol=1e-12):
        raise GridMismatch("frame paths live on different grids")
    t_gap = float(np.max(np.abs(path0.frames[:, 0, :] - path1.frames[:, 0, :])))
    if t_gap > tol:
        raise TangentMismatch(f"tangent rows differ by {t_gap:.3e}")
    zinv = np.stack([lorentz_inverse(z) for z in path0.frames])
    return np.einsum("nij,njk->nik", path1.frames, zinv)


@dataclass(frozen=True)
class Transformation:
    """A path of frame-change matrices with its structural diagnostics."""

    grid: np.ndarray
    matrices: np.ndarray
    block_defect: float     # deviation from the diag(1, O(3)) stabilizer form

    def __len__(self):
        return len(self.grid)


def transformation_between(path0, path1, tol=1e-8):
    g = transformation_matrices(path0, path1, tol)
    corner = np.abs(g[:, 0, 0] - 1.0)
    border = np.maximum(np.max(np.abs(g[:, 0, 1:]), axis=1),
                        np.max(np.abs(g[:, 1:, 0]), axis=1))
    spatial = g[:, 1:, 1:]
    ortho = np.einsum("nij,nkj->nik", spatial, spatial) - np.eye(3)
    defect = float(max(np.max(corner), np.max(border), np.max(np.abs(ortho))))
    return Transformation(grid=path0.grid.copy(), matrices=g, block_defect=defect)
