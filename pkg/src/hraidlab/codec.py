"""XOR codec for single-check-level layouts (k <= 1, l <= 1).

Inter-node check strips are the XOR of the data strips at the same (row,
position) in the other nodes; intra-node check strips are the XOR of all
other strips in their (row, node), inter-node checks included.  Encoding
therefore runs inter first, then intra.  Higher tolerances need a
Reed-Solomon style codec and are out of scope; reliability for k, l > 1 is
modeled combinatorially elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .config import HraidConfig, UnsupportedCodecError, ValidationError
from .layout import LayoutGrid, RoleKind, generate_layout

Cell = tuple[int, int, int]  # 1-based (row, node, position)


@dataclass(frozen=True, eq=False)
class StripeContent:
    """Strip payloads for every cell of a layout grid.

    ``strips[i-1, n-1, j-1]`` is the payload of row i, node n, position j
    as a uint8 vector; all strips share one length.
    """

    grid: LayoutGrid
    strips: np.ndarray

    def __post_init__(self) -> None:
        cfg = self.grid.config
        if self.strips.ndim != 4 or self.strips.shape[:3] != (cfg.m, cfg.n, cfg.m):
            raise ValidationError(
                f"strip array shape {self.strips.shape} does not match the "
                f"{(cfg.m, cfg.n, cfg.m)} grid"
            )

    @property
    def config(self) -> HraidConfig:
        return self.grid.config

    @property
    def strip_size(self) -> int:
        return self.strips.shape[3]

    def strip(self, cell: Cell) -> bytes:
        i, n, j = cell
        return self.strips[i - 1, n - 1, j - 1].tobytes()


@dataclass(frozen=True)
class RecoveryResult:
    """Outcome of a recovery attempt.

    ``data_loss`` marks erasure patterns beyond the code's capability; it
    is a valid outcome, not an error.  On success ``content`` holds every
    strip, re-derived where erased.
    """

    data_loss: bool
    failed_nodes: tuple[int, ...]
    content: StripeContent | None
    message: str


def _require_xor_codec(config: HraidConfig) -> None:
    if config.k > 1 or config.ell > 1:
        raise UnsupportedCodecError(
            f"XOR codec supports k <= 1 and l <= 1, got k={config.k}, "
            f"l={config.ell}"
        )


def data_cells(grid: LayoutGrid) -> list[Cell]:
    """All 1-based DATA cells of the grid, row-major."""
    cells = []
    cfg = grid.config
    for i in range(1, cfg.m + 1):
        for n in range(1, cfg.n + 1):
            for j in range(1, cfg.m + 1):
                if grid.codes[i - 1, n - 1, j - 1] == 0:
                    cells.append((i, n, j))
    return cells


def disk_cells(config: HraidConfig, node: int, disk: int) -> set[Cell]:
    """Cells held by one disk: every row at (node, position=disk)."""
    return {(i, node, disk) for i in range(1, config.m + 1)}


def node_cells(config: HraidConfig, node: int) -> set[Cell]:
    """Cells held by one whole node."""
    return {
        (i, node, j)
        for i in range(1, config.m + 1)
        for j in range(1, config.m + 1)
    }


def random_payloads(
    grid: LayoutGrid, seed: int, strip_size: int = 4096
) -> dict[Cell, bytes]:
    """Seeded random payload bytes for every DATA cell."""
    rng = np.random.default_rng(seed)
    return {
        cell: rng.integers(0, 256, strip_size, dtype=np.uint8).tobytes()
        for cell in data_cells(grid)
    }


def _inter_value(strips: np.ndarray, grid: LayoutGrid, cell: Cell) -> np.ndarray:
    """XOR of the DATA strips at this (row, position) in the other nodes."""
    i, n, j = cell
    cfg = grid.config
    acc = np.zeros(strips.shape[3], dtype=np.uint8)
    for other in range(1, cfg.n + 1):
        if other != n and grid.codes[i - 1, other - 1, j - 1] == 0:
            acc ^= strips[i - 1, other - 1, j - 1]
    return acc


def _intra_value(strips: np.ndarray, grid: LayoutGrid, cell: Cell) -> np.ndarray:
    """XOR of all other strips in this (row, node), inter-checks included."""
    i, n, j = cell
    cfg = grid.config
    acc = np.zeros(strips.shape[3], dtype=np.uint8)
    for pos in range(1, cfg.m + 1):
        if pos != j:
            acc ^= strips[i - 1, n - 1, pos - 1]
    return acc


def encode_stripes(
    data: Mapping[Cell, bytes],
    config: HraidConfig,
    grid: LayoutGrid | None = None,
) -> StripeContent:
    """Encode data payloads into a fully checked StripeContent.

    ``data`` must supply a payload of uniform length for exactly the DATA
    cells of the layout.  Re-encoding the same data is idempotent.
    """
    _require_xor_codec(config)
    if grid is None:
        grid = generate_layout(config)
    expected = set(data_cells(grid))
    supplied = set(data.keys())
    if supplied != expected:
        missing = sorted(expected - supplied)[:3]
        extra = sorted(supplied - expected)[:3]
        raise ValidationError(
            f"payloads must cover exactly the DATA cells; "
            f"missing {missing}, unexpected {extra}"
        )
    sizes = {len(v) for v in data.values()}
    if len(sizes) != 1:
        raise ValidationError(f"strip payloads must share one length, got {sorted(sizes)}")
    size = sizes.pop()
    if size == 0:
        raise ValidationError("strip payloads must be non-empty")

    cfg = grid.config
    strips = np.zeros((cfg.m, cfg.n, cfg.m, size), dtype=np.uint8)
    for (i, n, j), payload in data.items():
        strips[i - 1, n - 1, j - 1] = np.frombuffer(payload, dtype=np.uint8)

    # inter checks first: they depend only on data strips
    for i in range(1, cfg.m + 1):
        for n in range(1, cfg.n + 1):
            for j in range(1, cfg.m + 1):
                role = grid.role_at(i, n, j)
                if role.kind is RoleKind.INTER_CHECK:
                    strips[i - 1, n - 1, j - 1] = _inter_value(strips, grid, (i, n, j))
    for i in range(1, cfg.m + 1):
        for n in range(1, cfg.n + 1):
            for j in range(1, cfg.m + 1):
                role = grid.role_at(i, n, j)
                if role.kind is RoleKind.INTRA_CHECK:
                    strips[i - 1, n - 1, j - 1] = _intra_value(strips, grid, (i, n, j))
    return StripeContent(grid=grid, strips=strips)


def verify_parity(content: StripeContent) -> list[str]:
    """Check every parity equation; return violations (empty when valid)."""
    grid = content.grid
    cfg = grid.config
    strips = content.strips
    violations = []
    for i in range(1, cfg.m + 1):
        for n in range(1, cfg.n + 1):
            for j in range(1, cfg.m + 1):
                role = grid.role_at(i, n, j)
                if role.kind is RoleKind.INTER_CHECK:
                    want = _inter_value(strips, grid, (i, n, j))
                elif role.kind is RoleKind.INTRA_CHECK:
                    want = _intra_value(strips, grid, (i, n, j))
                else:
                    continue
                if not np.array_equal(strips[i - 1, n - 1, j - 1], want):
                    violations.append(
                        f"check strip at row {i}, node {n}, position {j} does "
                        f"not match its parity equation"
                    )
    return violations


def recover(content: StripeContent, erased: Iterable[Cell]) -> RecoveryResult:
    """Rebuild erased strips, or report data loss.

    A node is treated as failed when any of its rows has more than l
    erased strips; more than k failed nodes is data loss.  Erasures within
    tolerance rebuild from the intra-node parity; failed nodes rebuild
    from the inter-node checks in their columns.
    """
    grid = content.grid
    cfg = grid.config
    _require_xor_codec(cfg)
    erased_set = set(erased)
    for cell in erased_set:
        i, n, j = cell
        if not (1 <= i <= cfg.m and 1 <= n <= cfg.n and 1 <= j <= cfg.m):
            raise ValidationError(f"erased cell {cell} is outside the grid")

    failed_nodes = set()
    for n in range(1, cfg.n + 1):
        for i in range(1, cfg.m + 1):
            count = sum(1 for (ri, rn, _) in erased_set if ri == i and rn == n)
            if count > cfg.ell:
                failed_nodes.add(n)
                break
    if len(failed_nodes) > cfg.k:
        return RecoveryResult(
            data_loss=True,
            failed_nodes=tuple(sorted(failed_nodes)),
            content=None,
            message=(
                f"{len(failed_nodes)} failed node(s) exceed the inter-node "
                f"tolerance k={cfg.k}"
            ),
        )

    strips = content.strips.copy()
    for (i, n, j) in erased_set:
        # drop the stale bytes so every erased strip is genuinely rebuilt
        strips[i - 1, n - 1, j - 1] = 0

    # phase 1: within-tolerance erasures at healthy nodes, via intra parity
    # (the XOR of a full node row is zero, so one missing strip is the XOR
    # of the rest)
    for n in range(1, cfg.n + 1):
        if n in failed_nodes:
            continue
        for i in range(1, cfg.m + 1):
            row_erased = [c for c in erased_set if c[0] == i and c[1] == n]
            if not row_erased:
                continue
            (_, _, j) = row_erased[0]
            acc = np.zeros(strips.shape[3], dtype=np.uint8)
            for pos in range(1, cfg.m + 1):
                if pos != j:
                    acc ^= strips[i - 1, n - 1, pos - 1]
            strips[i - 1, n - 1, j - 1] = acc

    # phase 2: failed nodes, via the inter-node check in each column
    for n in sorted(failed_nodes):
        pending_intra = []
        for i in range(1, cfg.m + 1):
            for j in range(1, cfg.m + 1):
                if (i, n, j) not in erased_set:
                    continue
                role = grid.role_at(i, n, j)
                if role.kind is RoleKind.INTRA_CHECK:
                    pending_intra.append((i, n, j))
                    continue
                if role.kind is RoleKind.INTER_CHECK:
                    strips[i - 1, n - 1, j - 1] = _inter_value(strips, grid, (i, n, j))
                    continue
                holder = None
                for other in range(1, cfg.n + 1):
                    if other == n or other in failed_nodes:
                        continue
                    if grid.role_at(i, other, j).kind is RoleKind.INTER_CHECK:
                        holder = other
                        break
                if holder is None:
                    return RecoveryResult(
                        data_loss=True,
                        failed_nodes=tuple(sorted(failed_nodes)),
                        content=None,
                        message=(
                            f"no surviving inter-node check covers row {i}, "
                            f"position {j}"
                        ),
                    )
                acc = strips[i - 1, holder - 1, j - 1].copy()
                for other in range(1, cfg.n + 1):
                    if other in (n, holder):
                        continue
                    if grid.codes[i - 1, other - 1, j - 1] == 0:
                        acc ^= strips[i - 1, other - 1, j - 1]
                strips[i - 1, n - 1, j - 1] = acc
        for (i, nn, j) in pending_intra:
            acc = np.zeros(strips.shape[3], dtype=np.uint8)
            for pos in range(1, cfg.m + 1):
                if pos != j:
                    acc ^= strips[i - 1, nn - 1, pos - 1]
            strips[i - 1, nn - 1, j - 1] = acc

    return RecoveryResult(
        data_loss=False,
        failed_nodes=tuple(sorted(failed_nodes)),
        content=StripeContent(grid=grid, strips=strips),
        message="all erased strips rebuilt",
    )


def write_strip_tree(content: StripeContent, root: Path | str) -> None:
    """Write strips as ``node{n}/disk{j}/row{i}.bin`` under ``root``."""
    root = Path(root)
    cfg = content.config
    for n in range(1, cfg.n + 1):
        for j in range(1, cfg.m + 1):
            d = root / f"node{n}" / f"disk{j}"
            d.mkdir(parents=True, exist_ok=True)
            for i in range(1, cfg.m + 1):
                (d / f"row{i}.bin").write_bytes(content.strip((i, n, j)))


def read_strip_tree(
    root: Path | str, config: HraidConfig
) -> tuple[StripeContent, set[Cell]]:
    """Read a strip tree; missing files are reported as erased cells."""
    root = Path(root)
    grid = generate_layout(config)
    erased: set[Cell] = set()
    payloads: dict[Cell, bytes] = {}
    size = None
    for n in range(1, config.n + 1):
        for j in range(1, config.m + 1):
            for i in range(1, config.m + 1):
                p = root / f"node{n}" / f"disk{j}" / f"row{i}.bin"
                if p.exists():
                    raw = p.read_bytes()
                    if size is None:
                        size = len(raw)
                    elif len(raw) != size:
                        raise ValidationError(
                            f"strip file {p} has length {len(raw)}, expected {size}"
                        )
                    payloads[(i, n, j)] = raw
                else:
                    erased.add((i, n, j))
    if size is None:
        raise ValidationError(f"no strip files found under {root}")
    strips = np.zeros((config.m, config.n, config.m, size), dtype=np.uint8)
    for (i, n, j), raw in payloads.items():
        strips[i - 1, n - 1, j - 1] = np.frombuffer(raw, dtype=np.uint8)
    return StripeContent(grid=grid, strips=strips), erased
