"""Trace-inequality diagnostics for tensor pairs.

For tensors X, Y of common shape the inner product is bounded by the pairing
of sorted per-mode singular values, <X, Y> <= <sigma_d(X), sigma_d(Y)> for
every mode d. Equality holds simultaneously in all modes exactly when both
tensors are carried by one shared orthogonal frame per mode with aligned,
blockwise-proportional cores; this module computes the per-mode gaps and
verifies that block structure for candidate frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import is_orthogonal
from .spectral import mode_spectrum
from .tensor import frobenius, inner, multi_mode_mul

__all__ = [
    "VnReport",
    "BlockPartition",
    "vn_report",
    "find_block_partition",
    "verify_equality_structure",
    "check_equality_via_structure",
]


@dataclass(frozen=True)
class VnReport:
    """Per-mode spectral bounds on an inner product and their gaps."""

    inner: float
    per_mode_bound: np.ndarray
    per_mode_gap: np.ndarray
    equality: bool


@dataclass(frozen=True)
class BlockPartition:
    """Aligned per-mode index partitions.

    ``blocks[b][d]`` holds the sorted 1-based mode-(d+1) indices of block b.
    For every mode the sets are disjoint and cover 1..n_d.
    """

    blocks: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def vn_report(x, y, tol: float = 1e-10) -> VnReport:
    """Inner product of a pair against its per-mode spectral bounds.

    ``equality`` is true when every gap is at most tol * max(1, ||x|| ||y||).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape: operands differ, {x.shape} vs {y.shape}")
    value = inner(x, y)
    bounds = np.array(
        [
            float(np.dot(mode_spectrum(x, d), mode_spectrum(y, d)))
            for d in range(1, x.ndim + 1)
        ]
    )
    gaps = bounds - value
    scale = max(1.0, frobenius(x) * frobenius(y))
    return VnReport(
        inner=value,
        per_mode_bound=bounds,
        per_mode_gap=gaps,
        equality=bool(np.max(gaps) <= tol * scale),
    )


def _find(parent: list[int], i: int) -> int:
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def find_block_partition(cx, cy, tol: float = 1e-10) -> BlockPartition:
    """Finest common block partition of two aligned core tensors.

    Every entry of either input above tol times that input's Frobenius norm
    links its D index coordinates; connected components become blocks.
    Indices touching no above-threshold entry are gathered into one shared
    residual block (zero block for both inputs).
    """
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    if cx.shape != cy.shape:
        raise ValueError(f"shape: operands differ, {cx.shape} vs {cy.shape}")
    dims = cx.shape
    ndim = len(dims)
    offsets = np.concatenate([[0], np.cumsum(dims)])[:-1]

    mask = (np.abs(cx) > tol * frobenius(cx)) | (np.abs(cy) > tol * frobenius(cy))
    parent = list(range(int(sum(dims))))
    touched = [np.zeros(n, dtype=bool) for n in dims]
    for entry in np.argwhere(mask):
        nodes = [int(offsets[d] + entry[d]) for d in range(ndim)]
        for d in range(ndim):
            touched[d][entry[d]] = True
        for node in nodes[1:]:
            ra, rb = _find(parent, nodes[0]), _find(parent, node)
            if ra != rb:
                parent[rb] = ra

    groups: dict[int, list[list[int]]] = {}
    for d in range(ndim):
        for i in range(dims[d]):
            if not touched[d][i]:
                continue
            root = _find(parent, int(offsets[d] + i))
            groups.setdefault(root, [[] for _ in range(ndim)])[d].append(i + 1)

    blocks = sorted(groups.values(), key=lambda per_mode: min(per_mode[0]))
    residual = [
        [i + 1 for i in range(dims[d]) if not touched[d][i]] for d in range(ndim)
    ]
    if any(residual):
        blocks.append(residual)
    return BlockPartition(
        blocks=tuple(tuple(tuple(ids) for ids in per_mode) for per_mode in blocks)
    )


def _check_partition(partition: BlockPartition, dims: tuple[int, ...]) -> None:
    ndim = len(dims)
    if partition.n_blocks < 1:
        raise ValueError("partition: needs at least one block")
    for per_mode in partition.blocks:
        if len(per_mode) != ndim:
            raise ValueError("partition: blocks must list one index set per mode")
    for d in range(ndim):
        seen: list[int] = []
        for per_mode in partition.blocks:
            seen.extend(per_mode[d])
        if sorted(seen) != list(range(1, dims[d] + 1)):
            raise ValueError(
                f"partition: mode {d + 1} sets must partition 1..{dims[d]}"
            )


def verify_equality_structure(
    cx, cy, partition: BlockPartition, tol: float = 1e-10
) -> tuple[bool, np.ndarray]:
    """Check aligned supports and per-block proportionality of two cores.

    Returns ``(ok, constants)``. Both inputs must vanish outside the aligned
    blocks (off-block mass at most tol relative to each input's norm), and on
    each block the cores must be nonnegatively proportional. ``constants[b]``
    is the least-squares coefficient with cy_b ~= c * cx_b; when the cx block
    is zero the roles swap (NaN marks a zero cx block paired with a nonzero
    cy block).
    """
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    if cx.shape != cy.shape:
        raise ValueError(f"shape: operands differ, {cx.shape} vs {cy.shape}")
    _check_partition(partition, cx.shape)

    inside = np.zeros(cx.shape, dtype=bool)
    grids = []
    for per_mode in partition.blocks:
        idx = tuple(np.asarray(ids, dtype=int) - 1 for ids in per_mode)
        if any(axis.size == 0 for axis in idx):
            grids.append(None)
            continue
        grid = np.ix_(*idx)
        inside[grid] = True
        grids.append(grid)

    norm_x = max(1.0, frobenius(cx))
    norm_y = max(1.0, frobenius(cy))
    ok = bool(
        np.linalg.norm(cx[~inside]) <= tol * norm_x
        and np.linalg.norm(cy[~inside]) <= tol * norm_y
    )

    constants = np.zeros(partition.n_blocks)
    for b, grid in enumerate(grids):
        if grid is None:
            continue
        a = cx[grid].ravel()
        c = cy[grid].ravel()
        na, nc = np.linalg.norm(a), np.linalg.norm(c)
        if na > tol * norm_x:
            coeff = float(np.dot(a, c) / np.dot(a, a))
            residual = float(np.linalg.norm(c - coeff * a))
            ok = ok and residual <= tol * norm_y and coeff >= -tol
            constants[b] = coeff
        elif nc > tol * norm_y:
            # cx vanishes on the block: 0 = 0 * cy holds, no finite x-based ratio
            constants[b] = np.nan
        else:
            constants[b] = 0.0
    return ok, constants


def check_equality_via_structure(x, y, shared_factors, tol: float = 1e-10) -> bool:
    """Test the equality structure of a pair against candidate shared frames.

    Both tensors are rotated into the candidate frames, the finest common
    block partition is extracted and the proportionality conditions are
    verified. A positive answer is cross-checked against the per-mode gap
    report; an inconsistency between the two raises.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    frames = [np.asarray(w, dtype=float) for w in shared_factors]
    if len(frames) != x.ndim:
        raise ValueError(
            f"frames: expected one matrix per mode ({x.ndim}), got {len(frames)}"
        )
    for d, w in enumerate(frames, start=1):
        if not is_orthogonal(w, tol=1e-8):
            raise ValueError(f"frames: mode {d} candidate frame is not orthogonal")

    transposed = [w.T for w in frames]
    cx = multi_mode_mul(x, transposed)
    cy = multi_mode_mul(y, transposed)
    partition = find_block_partition(cx, cy, tol)
    ok, _ = verify_equality_structure(cx, cy, partition, tol)
    if ok and not vn_report(x, y, tol).equality:
        raise ArithmeticError(
            "structure verified but per-mode gaps exceed tolerance; "
            "inputs are inconsistent with the claimed frames"
        )
    return ok
