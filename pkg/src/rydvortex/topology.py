"""Phase singularities of complex fields sampled on rectangular grids."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from rydvortex.fields import ComplexField2D

ZERO_TOL = 1e-14


def wrap(d):
    """Wrap angles to (-pi, pi]; exactly -pi goes to +pi."""
    w = np.mod(np.asarray(d, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(w <= -np.pi, np.pi, w)


def _values(f):
    if isinstance(f, ComplexField2D):
        return f.values
    v = np.asarray(f)
    if v.ndim != 2:
        raise ValueError("expected a 2-D field")
    return v


def winding_map(f) -> np.ma.MaskedArray:
    """Winding number of every plaquette, counter-clockwise in (axis 0, axis 1).

    Plaquettes with a corner below ``ZERO_TOL`` in magnitude are masked as
    indeterminate.
    """
    v = _values(f)
    ph = np.angle(v)
    c00, c10, c11, c01 = ph[:-1, :-1], ph[1:, :-1], ph[1:, 1:], ph[:-1, 1:]
    total = wrap(c10 - c00) + wrap(c11 - c10) + wrap(c01 - c11) + wrap(c00 - c01)
    w = np.rint(total / (2 * np.pi)).astype(int)
    small = np.abs(v) < ZERO_TOL
    bad = small[:-1, :-1] | small[1:, :-1] | small[1:, 1:] | small[:-1, 1:]
    return np.ma.MaskedArray(np.where(bad, 0, w), mask=bad)


@dataclass(frozen=True)
class Vortex:
    i: int
    j: int
    x: float
    y: float
    charge: int
    core_abs: float


@dataclass(frozen=True)
class VortexSet:
    vortices: tuple
    indeterminate: int = 0

    def __len__(self):
        return len(self.vortices)

    def __iter__(self):
        return iter(self.vortices)

    @property
    def charges(self):
        return np.array([v.charge for v in self.vortices], dtype=int)

    @property
    def positions(self):
        return np.array([(v.x, v.y) for v in self.vortices], dtype=float).reshape(-1, 2)

    @property
    def total_charge(self) -> int:
        return int(self.charges.sum())

    def within(self, xlim, ylim) -> "VortexSet":
        keep = tuple(v for v in self.vortices
                     if xlim[0] <= v.x <= xlim[1] and ylim[0] <= v.y <= ylim[1])
        return VortexSet(keep, self.indeterminate)

    def rows(self):
        return [(v.x, v.y, v.charge, v.core_abs) for v in self.vortices]


def _bilinear_zero(f00, f10, f01, f11):
    """Zero of the bilinear interpolant on the unit square (Newton), or the centre."""
    s = t = 0.5
    for _ in range(30):
        val = f00 * (1 - s) * (1 - t) + f10 * s * (1 - t) + f01 * (1 - s) * t + f11 * s * t
        ds = (f10 - f00) * (1 - t) + (f11 - f01) * t
        dt = (f01 - f00) * (1 - s) + (f11 - f10) * s
        J = np.array([[ds.real, dt.real], [ds.imag, dt.imag]])
        try:
            step = np.linalg.solve(J, [-val.real, -val.imag])
        except np.linalg.LinAlgError:
            break
        s, t = s + step[0], t + step[1]
        if abs(step[0]) + abs(step[1]) < 1e-12:
            break
    if not (-0.01 <= s <= 1.01 and -0.01 <= t <= 1.01):
        return 0.5, 0.5
    return float(np.clip(s, 0, 1)), float(np.clip(t, 0, 1))


def find_vortices(f, x=None, y=None) -> VortexSet:
    """All plaquettes with non-zero winding, cores refined to the bilinear zero."""
    if isinstance(f, ComplexField2D):
        x, y = f.x, f.y
    v = _values(f)
    x = np.arange(v.shape[0], dtype=float) if x is None else np.asarray(x, float)
    y = np.arange(v.shape[1], dtype=float) if y is None else np.asarray(y, float)
    w = winding_map(v)
    out = []
    for i, j in zip(*np.nonzero(w.filled(0))):
        s, t = _bilinear_zero(v[i, j], v[i + 1, j], v[i, j + 1], v[i + 1, j + 1])
        core = float(np.min(np.abs(v[i:i + 2, j:j + 2])))
        out.append(Vortex(int(i), int(j), x[i] + s * (x[i + 1] - x[i]),
                          y[j] + t * (y[j + 1] - y[j]), int(w[i, j]), core))
    return VortexSet(tuple(out), int(np.count_nonzero(w.mask)))


def unwrap_phase_2d(f, anchor=(0, 0)) -> np.ndarray:
    """Quality-guided path unwrapping of arg(f), starting from ``anchor``.

    Pixels are visited in order of decreasing |f|, so the unavoidable branch
    cuts of any vortices end up along the ridges of smallest amplitude.
    The anchor keeps its wrapped phase.
    """
    v = _values(f)
    ph = np.angle(v)
    q = np.abs(v)
    n, m = v.shape
    out = np.full((n, m), np.nan)
    done = np.zeros((n, m), dtype=bool)
    i0, j0 = anchor
    out[i0, j0] = ph[i0, j0]
    done[i0, j0] = True
    heap = []

    def push(i, j):
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < n and 0 <= b < m and not done[a, b]:
                heapq.heappush(heap, (-q[a, b], a, b, i, j))

    push(i0, j0)
    while heap:
        _, a, b, i, j = heapq.heappop(heap)
        if done[a, b]:
            continue
        out[a, b] = out[i, j] + wrap(ph[a, b] - ph[i, j])
        done[a, b] = True
        push(a, b)
    return out


def phase_gradient_magnitude(phase, dx: float, dy: float, window: int = 3) -> np.ndarray:
    """|grad phi| from the smoothed unit phasor P = exp(i phi).

    P is box-averaged over ``window`` x ``window`` neighbours before taking
    |grad P|, which equals |grad phi| wherever |P| = 1 and stays finite at
    vortex cores.
    """
    P = np.exp(1j * np.asarray(phase, dtype=float))
    if window > 1:
        P = (ndimage.uniform_filter(P.real, size=window, mode="nearest")
             + 1j * ndimage.uniform_filter(P.imag, size=window, mode="nearest"))
    gx, gy = np.gradient(P, dx, dy)
    return np.sqrt(np.abs(gx) ** 2 + np.abs(gy) ** 2)


def boundary_circulation(f) -> int:
    """Winding of the phase along the outer boundary of the grid, counter-clockwise."""
    v = _values(f)
    loop = np.concatenate([v[:, 0], v[-1, 1:], v[-2::-1, -1], v[0, -2:0:-1], v[:1, 0]])
    return int(np.rint(np.sum(wrap(np.diff(np.angle(loop)))) / (2 * np.pi)))


def winding_map_3d(values) -> tuple:
    """Plaquette windings of a 3-D sampled field for the three face orientations.

    Entry ``k`` holds faces normal to axis ``k``, oriented counter-clockwise in
    the cyclic pair (k+1, k+2), so a vortex line carries the same charge
    through consecutive faces.  Shapes: faces normal to axis 0 have shape
    (n0, n1-1, n2-1), and so on.
    """
    v = np.asarray(values)
    if v.ndim != 3:
        raise ValueError("expected a 3-D field")
    out = []
    for k in range(3):
        # move axes so the plane (k+1, k+2) is last two, normal first
        moved = np.moveaxis(v, (k, (k + 1) % 3, (k + 2) % 3), (0, 1, 2))
        ph = np.angle(moved)
        c00, c10 = ph[:, :-1, :-1], ph[:, 1:, :-1]
        c11, c01 = ph[:, 1:, 1:], ph[:, :-1, 1:]
        total = wrap(c10 - c00) + wrap(c11 - c10) + wrap(c01 - c11) + wrap(c00 - c01)
        w = np.rint(total / (2 * np.pi)).astype(int)
        out.append(np.moveaxis(w, (0, 1, 2), (k, (k + 1) % 3, (k + 2) % 3)))
    return tuple(out)


@dataclass(frozen=True)
class VortexLine:
    """One connected vortex line: the grid cells it threads, in index space."""

    cells: np.ndarray  # (m, 3) lower-corner indices
    centers: np.ndarray  # (m, 3) physical cell centres
    closed: bool  # does not reach the grid boundary

    @property
    def extent(self):
        return self.centers.min(axis=0), self.centers.max(axis=0)


def vortex_lines_3d(values, axes=None) -> list:
    """Trace vortex lines through a 3-D sampled field.

    Cells are joined through every pierced face they share.  A line that
    pierces a face on the outer surface of the grid is open; the rest are
    closed loops (rings).  Returned longest first.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    v = np.asarray(values)
    shape = v.shape
    if axes is None:
        axes = [np.arange(s, dtype=float) for s in shape]
    axes = [np.asarray(a, dtype=float) for a in axes]
    cshape = tuple(s - 1 for s in shape)
    faces = winding_map_3d(v)
    rows, cols = [], []
    boundary_cells = []
    for k, w in enumerate(faces):
        idx = np.argwhere(w != 0)
        if idx.size == 0:
            continue
        lo = idx.copy()
        lo[:, k] -= 1
        hi = idx
        ok_lo = lo[:, k] >= 0
        ok_hi = hi[:, k] < cshape[k]
        both = ok_lo & ok_hi
        a = np.ravel_multi_index(lo[both].T, cshape)
        b = np.ravel_multi_index(hi[both].T, cshape)
        rows.extend(a)
        cols.extend(b)
        # faces on the surface: keep the one existing neighbour
        if np.any(~ok_lo):
            boundary_cells.extend(np.ravel_multi_index(hi[~ok_lo].T, cshape))
        if np.any(~ok_hi):
            boundary_cells.extend(np.ravel_multi_index(lo[~ok_hi].T, cshape))
        # a pierced face always marks its cells, even without a partner
        rows.extend(np.ravel_multi_index(hi[ok_hi].T, cshape))
        cols.extend(np.ravel_multi_index(hi[ok_hi].T, cshape))
        rows.extend(np.ravel_multi_index(lo[ok_lo].T, cshape))
        cols.extend(np.ravel_multi_index(lo[ok_lo].T, cshape))
    if not rows:
        return []
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    used = np.unique(np.concatenate([rows, cols]))
    remap = {c: i for i, c in enumerate(used)}
    r = np.fromiter((remap[c] for c in rows), dtype=np.int64, count=rows.size)
    c = np.fromiter((remap[c] for c in cols), dtype=np.int64, count=cols.size)
    g = coo_matrix((np.ones(r.size), (r, c)), shape=(used.size, used.size))
    ncomp, labels = connected_components(g, directed=False)
    on_surface = np.zeros(used.size, dtype=bool)
    for bc in boundary_cells:
        on_surface[remap[bc]] = True
    centres = [0.5 * (a[:-1] + a[1:]) for a in axes]
    lines = []
    for comp in range(ncomp):
        members = used[labels == comp]
        cells = np.array(np.unravel_index(members, cshape)).T
        pos = np.column_stack([centres[d][cells[:, d]] for d in range(3)])
        lines.append(VortexLine(cells, pos, closed=not on_surface[labels == comp].any()))
    lines.sort(key=lambda ln: -len(ln.cells))
    return lines
