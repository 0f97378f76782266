"""
Finite-volume meshes
--------------------

A :class:`Mesh` stores cells and oriented faces as flat numpy arrays, so that
the same code handles 1D intervals and 2D Cartesian grids (and, in principle,
any polygonal mesh with a bounded number of faces per cell).

Conventions:

* every face carries one reference unit normal ``face_normal[f]``, pointing
  from ``face_cells[f, 0]`` to ``face_cells[f, 1]``; on boundary faces
  ``face_cells[f, 1] == -1`` and the normal points outward;
* ``cell_faces[K, j]`` lists the faces of ``K`` and ``cell_face_sign[K, j]``
  is ``+1`` if ``K`` is the first cell of that face, ``-1`` otherwise, so that
  the outward normal of ``K`` on that face is ``sign * face_normal``;
* in 1D, faces are points and have measure one.

.. autoclass:: Mesh
.. autofunction:: build_1d
.. autofunction:: build_2d
.. autofunction:: h_max
.. autofunction:: h_underline
.. autofunction:: regularity_cm
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeshError


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable cell/face connectivity and geometry.

    .. attribute:: dim
    .. attribute:: lengths

        Extent of the (box) domain along each axis.

    .. attribute:: cell_volume
    .. attribute:: cell_center
    .. attribute:: cell_diameter
    .. attribute:: face_area
    .. attribute:: face_center
    .. attribute:: face_normal
    .. attribute:: face_cells
    .. attribute:: cell_faces
    .. attribute:: cell_face_sign
    """

    dim: int
    lengths: tuple
    cell_volume: np.ndarray
    cell_center: np.ndarray
    cell_diameter: np.ndarray
    face_area: np.ndarray
    face_center: np.ndarray
    face_normal: np.ndarray
    face_cells: np.ndarray
    cell_faces: np.ndarray
    cell_face_sign: np.ndarray

    def __post_init__(self):
        for name in ("cell_volume", "cell_center", "cell_diameter", "face_area",
                     "face_center", "face_normal", "face_cells", "cell_faces",
                     "cell_face_sign"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        self.validate()

    # {{{ sizes

    @property
    def n_cells(self) -> int:
        return self.cell_volume.size

    @property
    def n_faces(self) -> int:
        return self.face_area.size

    @property
    def max_faces(self) -> int:
        return self.cell_faces.shape[1]

    @property
    def interior(self) -> np.ndarray:
        """Boolean mask of interior faces."""
        return self.face_cells[:, 1] >= 0

    @property
    def boundary(self) -> np.ndarray:
        return self.face_cells[:, 1] < 0

    @property
    def interior_faces(self) -> np.ndarray:
        return np.flatnonzero(self.interior)

    @property
    def domain_measure(self) -> float:
        return float(np.prod(self.lengths))

    # }}}

    def neighbors(self) -> np.ndarray:
        """For each cell and face slot, the index of the cell across the face
        (``-1`` on the boundary)."""
        fc = self.face_cells[self.cell_faces]
        own = np.arange(self.n_cells)[:, None]
        return np.where(fc[..., 0] == own, fc[..., 1], fc[..., 0])

    def outward_normals(self) -> np.ndarray:
        """Array of shape ``(n_cells, max_faces, dim)`` holding n_{K,sigma}."""
        return self.cell_face_sign[..., None] * self.face_normal[self.cell_faces]

    def cell_sum(self, face_values: np.ndarray) -> np.ndarray:
        r"""Sum a face quantity oriented along ``face_normal`` over the faces of
        each cell, :math:`\sum_{\sigma \in E(K)} s_{K,\sigma} v_\sigma`."""
        v = np.asarray(face_values)[self.cell_faces]
        return (self.cell_face_sign * v).sum(axis=1)

    def validate(self, rtol: float = 1.0e-12):
        if self.dim not in (1, 2):
            raise MeshError(f"unsupported dimension: {self.dim}")
        if np.any(self.cell_volume <= 0) or np.any(self.face_area <= 0):
            raise MeshError("cell and face measures must be positive")

        counts = np.bincount(self.cell_faces.ravel(), minlength=self.n_faces)
        expected = np.where(self.interior, 2, 1)
        if not np.array_equal(counts, expected):
            raise MeshError("faces must have two (interior) or one (boundary) cells")

        # closed polytope: sum |sigma| n_{K,sigma} = 0
        closure = (self.face_area[self.cell_faces][..., None]
                   * self.outward_normals()).sum(axis=1)
        scale = self.face_area[self.cell_faces].sum(axis=1)
        if np.any(np.abs(closure) > rtol * scale[:, None]):
            raise MeshError("cells are not closed: sum |sigma| n_K,sigma != 0")


# {{{ providers

def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise MeshError(f"'{name}' must be positive (got {value!r})")


def build_1d(n_cells: int, length: float) -> Mesh:
    """Uniform mesh of ``n_cells`` intervals of ``[0, length]``."""
    _check_positive(n_cells=n_cells, length=length)
    n = int(n_cells)
    if n != n_cells:
        raise MeshError("n_cells must be an integer")

    h = length / n
    nodes = np.linspace(0.0, length, n + 1)

    face_cells = np.empty((n + 1, 2), dtype=np.int64)
    face_cells[1:n, 0] = np.arange(n - 1)
    face_cells[1:n, 1] = np.arange(1, n)
    face_cells[0] = (0, -1)
    face_cells[n] = (n - 1, -1)

    normal = np.ones((n + 1, 1))
    normal[0] = -1.0

    cell_faces = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    sign = np.where(face_cells[cell_faces, 0] == np.arange(n)[:, None], 1, -1)

    return Mesh(
        dim=1,
        lengths=(float(length),),
        cell_volume=np.full(n, h),
        cell_center=(0.5 * (nodes[:-1] + nodes[1:]))[:, None],
        cell_diameter=np.full(n, h),
        face_area=np.ones(n + 1),
        face_center=nodes[:, None],
        face_normal=normal,
        face_cells=face_cells,
        cell_faces=cell_faces,
        cell_face_sign=sign.astype(np.int64),
    )


def build_2d(nx: int, ny: int, lx: float, ly: float) -> Mesh:
    """Uniform Cartesian grid of ``nx * ny`` rectangles covering
    ``[0, lx] x [0, ly]``; cell ``(i, j)`` has index ``j * nx + i``."""
    _check_positive(nx=nx, ny=ny, lx=lx, ly=ly)
    nx, ny = int(nx), int(ny)
    dx, dy = lx / nx, ly / ny

    def cell(i, j):
        return j * nx + i

    xs = (np.arange(nx) + 0.5) * dx
    ys = (np.arange(ny) + 0.5) * dy
    cx, cy = np.meshgrid(xs, ys)  # shape (ny, nx), C order matches j * nx + i

    face_cells, face_center, face_normal, face_area = [], [], [], []

    # vertical faces x = i * dx, normal +x
    vert = np.empty((nx + 1, ny), dtype=np.int64)
    for j in range(ny):
        for i in range(nx + 1):
            vert[i, j] = len(face_cells)
            y = (j + 0.5) * dy
            if i == 0:
                face_cells.append((cell(0, j), -1))
                face_normal.append((-1.0, 0.0))
            elif i == nx:
                face_cells.append((cell(nx - 1, j), -1))
                face_normal.append((1.0, 0.0))
            else:
                face_cells.append((cell(i - 1, j), cell(i, j)))
                face_normal.append((1.0, 0.0))
            face_center.append((i * dx, y))
            face_area.append(dy)

    # horizontal faces y = j * dy, normal +y
    horz = np.empty((nx, ny + 1), dtype=np.int64)
    for j in range(ny + 1):
        for i in range(nx):
            horz[i, j] = len(face_cells)
            x = (i + 0.5) * dx
            if j == 0:
                face_cells.append((cell(i, 0), -1))
                face_normal.append((0.0, -1.0))
            elif j == ny:
                face_cells.append((cell(i, ny - 1), -1))
                face_normal.append((0.0, 1.0))
            else:
                face_cells.append((cell(i, j - 1), cell(i, j)))
                face_normal.append((0.0, 1.0))
            face_center.append((x, j * dy))
            face_area.append(dx)

    cell_faces = np.empty((nx * ny, 4), dtype=np.int64)
    for j in range(ny):
        for i in range(nx):
            cell_faces[cell(i, j)] = (vert[i, j], vert[i + 1, j],
                                      horz[i, j], horz[i, j + 1])

    face_cells = np.array(face_cells, dtype=np.int64)
    sign = np.where(face_cells[cell_faces, 0] == np.arange(nx * ny)[:, None], 1, -1)

    return Mesh(
        dim=2,
        lengths=(float(lx), float(ly)),
        cell_volume=np.full(nx * ny, dx * dy),
        cell_center=np.stack([cx.ravel(), cy.ravel()], axis=1),
        cell_diameter=np.full(nx * ny, np.hypot(dx, dy)),
        face_area=np.array(face_area),
        face_center=np.array(face_center),
        face_normal=np.array(face_normal),
        face_cells=face_cells,
        cell_faces=cell_faces,
        cell_face_sign=sign.astype(np.int64),
    )


def build(dim: int, resolution, lengths) -> Mesh:
    """Dispatch to :func:`build_1d` or :func:`build_2d`."""
    if dim == 1:
        n = resolution[0] if np.ndim(resolution) else resolution
        return build_1d(n, lengths[0])
    if dim == 2:
        return build_2d(resolution[0], resolution[1], lengths[0], lengths[1])
    raise MeshError(f"unsupported dimension: {dim}")

# }}}


# {{{ regularity parameters

def h_max(mesh: Mesh) -> float:
    """Largest cell diameter."""
    return float(mesh.cell_diameter.max())


def h_underline(mesh: Mesh) -> float:
    """Smallest ratio |K| / sum of face measures of K, boundary faces included."""
    perimeter = mesh.face_area[mesh.cell_faces].sum(axis=1)
    return float((mesh.cell_volume / perimeter).min())


def regularity_cm(mesh: Mesh) -> float:
    """Largest (|sigma| + |sigma'|) h_K / |K| over cells and ordered face pairs."""
    areas = mesh.face_area[mesh.cell_faces]
    pair = areas[:, :, None] + areas[:, None, :]
    return float((pair.max(axis=(1, 2)) * mesh.cell_diameter / mesh.cell_volume).max())

# }}}
