"""HRAID strip layouts: generation, verification, export, and the
small-write cost model.

A layout places, for every stripe row and every node, l intra-node check
strips (P-class) and k inter-node check strips (Q/R-class) among the M disk
positions of that node.  Check strips rotate across rows and nodes in the
left-symmetric RAID5 style so that load balances over disks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import HraidConfig, ValidationError

#: Check-strip letters, assigned to the l intra classes first, then the
#: k inter classes (P intra and Q inter for HRAID1/1; P, Q intra and R
#: inter for HRAID1/2, and so on).
CHECK_LETTERS = "PQRSTU"


class RoleKind(Enum):
    DATA = "data"
    INTRA_CHECK = "intra"
    INTER_CHECK = "inter"


@dataclass(frozen=True)
class StripRole:
    """Role of one grid cell: data, or the ``index``-th check of its kind."""

    kind: RoleKind
    index: int = 0


def anchor_position(row: int, node: int, m: int) -> int:
    """1-based position where the check run of (row, node) starts.

    The run occupies consecutive cyclic positions; shifting by one position
    per row and per node balances check strips over disks and, for N = M,
    over stripe columns.
    """
    return ((-(row + node)) % m) + 1


@dataclass(frozen=True, eq=False)
class LayoutGrid:
    """Role assignment for M stripe rows of an N x M-disk array.

    ``codes[i-1, n-1, j-1]`` encodes the role of stripe row i, node n,
    position j (all 1-based, matching the usual layout-figure convention):
    0 is data, 1..l are the intra-check classes, l+1..l+k the inter-check
    classes.  Rows beyond M repeat this pattern with period M.
    """

    config: HraidConfig
    codes: np.ndarray

    def __post_init__(self) -> None:
        m, n = self.config.m, self.config.n
        if self.codes.shape != (m, n, m):
            raise ValidationError(
                f"grid shape {self.codes.shape} does not match config "
                f"(expected {(m, n, m)})"
            )

    def role_at(self, row: int, node: int, pos: int) -> StripRole:
        code = int(self.codes[row - 1, node - 1, pos - 1])
        ell = self.config.ell
        if code == 0:
            return StripRole(RoleKind.DATA)
        if code <= ell:
            return StripRole(RoleKind.INTRA_CHECK, code - 1)
        return StripRole(RoleKind.INTER_CHECK, code - 1 - ell)

    def letter_at(self, row: int, node: int, pos: int) -> str:
        code = int(self.codes[row - 1, node - 1, pos - 1])
        return "D" if code == 0 else CHECK_LETTERS[code - 1]

    def node_row_letters(self, row: int, node: int) -> str:
        """Role letters of one node's row, e.g. ``\"DDPQ\"``."""
        return "".join(
            self.letter_at(row, node, j) for j in range(1, self.config.m + 1)
        )

    def as_text(self) -> str:
        """Figure-style table: cell tokens ``X{row},{pos}^{node}``."""
        cfg = self.config
        width = max(
            len(f"D{cfg.m},{cfg.m}^{cfg.n}"),
            6,
        )
        lines = [
            f"HRAID {cfg.k}/{cfg.ell} layout: N={cfg.n} nodes x M={cfg.m} disks, "
            f"stripe rows 1..{cfg.m} (pattern repeats with period {cfg.m})"
        ]
        header = "        " + " | ".join(
            f"SN {n}".center(width * cfg.m + cfg.m - 1) for n in range(1, cfg.n + 1)
        )
        lines.append(header)
        for i in range(1, cfg.m + 1):
            blocks = []
            for n in range(1, cfg.n + 1):
                cells = [
                    f"{self.letter_at(i, n, j)}{i},{j}^{n}".ljust(width)
                    for j in range(1, cfg.m + 1)
                ]
                blocks.append(" ".join(cells))
            lines.append(f"row {i:<3} " + " | ".join(blocks))
        return "\n".join(lines)

    def to_json(self) -> str:
        """Machine-readable grid: letters nested as rows -> nodes -> positions."""
        cfg = self.config
        obj = {
            "n": cfg.n,
            "m": cfg.m,
            "k": cfg.k,
            "ell": cfg.ell,
            "rows": [
                [
                    [self.letter_at(i, n, j) for j in range(1, cfg.m + 1)]
                    for n in range(1, cfg.n + 1)
                ]
                for i in range(1, cfg.m + 1)
            ],
        }
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LayoutGrid":
        obj = json.loads(text)
        cfg = HraidConfig(
            n_nodes=obj["n"],
            disks_per_node=obj["m"],
            inter_tolerance=obj["k"],
            intra_tolerance=obj["ell"],
        )
        codes = np.zeros((cfg.m, cfg.n, cfg.m), dtype=np.int8)
        for i, row in enumerate(obj["rows"]):
            for n, node_cells in enumerate(row):
                for j, letter in enumerate(node_cells):
                    if letter == "D":
                        codes[i, n, j] = 0
                    else:
                        idx = CHECK_LETTERS.index(letter)
                        if idx >= cfg.k + cfg.ell:
                            raise ValidationError(
                                f"letter {letter!r} at row {i + 1}, node {n + 1}, "
                                f"position {j + 1} exceeds k+l={cfg.k + cfg.ell} "
                                f"check classes"
                            )
                        codes[i, n, j] = idx + 1
        return cls(config=cfg, codes=codes)


def generate_layout(config: HraidConfig) -> LayoutGrid:
    """Generate the rotating check-strip layout for ``config``.

    For stripe row i and node n the k+l check strips occupy consecutive
    cyclic positions starting at ``anchor_position(i, n, M)``: the l
    intra-node checks first, then the k inter-node checks.
    """
    m, n_nodes = config.m, config.n
    k, ell = config.k, config.ell
    codes = np.zeros((m, n_nodes, m), dtype=np.int8)
    for i in range(1, m + 1):
        for n in range(1, n_nodes + 1):
            a = anchor_position(i, n, m)
            for c in range(k + ell):
                pos = ((a - 1 + c) % m) + 1
                codes[i - 1, n - 1, pos - 1] = c + 1
    return LayoutGrid(config=config, codes=codes)


def verify_layout(grid: LayoutGrid, config: HraidConfig | None = None) -> list[str]:
    """Check every layout invariant; return violations (empty when valid).

    Verified invariants:

    - each (row, node) pair holds exactly l intra-check and k inter-check
      strips;
    - over the M rows, each disk (node, position) holds exactly k+l check
      strips;
    - for N = M, each (row, position) column holds exactly l intra-check
      and k inter-check strips across the N nodes.

    The verifier, not the generator formula, is the layout contract: any
    grid passing these checks balances load equivalently.
    """
    cfg = config if config is not None else grid.config
    if config is not None and config != grid.config:
        raise ValidationError(
            f"grid was built for {grid.config}, verification requested for {config}"
        )
    m, n_nodes, k, ell = cfg.m, cfg.n, cfg.k, cfg.ell
    codes = grid.codes
    intra = (codes >= 1) & (codes <= ell)
    inter = codes > ell
    violations: list[str] = []

    for i in range(m):
        for n in range(n_nodes):
            ni = int(intra[i, n].sum())
            nq = int(inter[i, n].sum())
            if ni != ell or nq != k:
                violations.append(
                    f"row {i + 1}, node {n + 1}: expected {ell} intra and {k} "
                    f"inter check strips, found {ni} intra and {nq} inter"
                )

    per_disk = (codes > 0).sum(axis=0)
    for n in range(n_nodes):
        for j in range(m):
            cnt = int(per_disk[n, j])
            if cnt != k + ell:
                violations.append(
                    f"disk (node {n + 1}, position {j + 1}): expected {k + ell} "
                    f"check strips over {m} rows, found {cnt}"
                )

    if n_nodes == m:
        for i in range(m):
            for j in range(m):
                ci = int(intra[i, :, j].sum())
                cq = int(inter[i, :, j].sum())
                if ci != ell or cq != k:
                    violations.append(
                        f"column (row {i + 1}, position {j + 1}): expected {ell} "
                        f"intra and {k} inter check strips across nodes, found "
                        f"{ci} intra and {cq} inter"
                    )
    return violations


@dataclass(frozen=True)
class WorkloadParams:
    """Access mix for the small-write cost model.

    ``read_fraction`` (f_r) and ``write_fraction`` (f_w) must sum to one;
    ``disk_access_time_ms`` (x_d) is the cost of one disk access.
    """

    read_fraction: float
    write_fraction: float
    disk_access_time_ms: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.read_fraction <= 1.0:
            raise ValidationError(
                f"read_fraction must be in [0, 1], got {self.read_fraction}"
            )
        if not 0.0 <= self.write_fraction <= 1.0:
            raise ValidationError(
                f"write_fraction must be in [0, 1], got {self.write_fraction}"
            )
        if abs(self.read_fraction + self.write_fraction - 1.0) > 1e-12:
            raise ValidationError(
                f"read_fraction + write_fraction must equal 1, got "
                f"{self.read_fraction} + {self.write_fraction}"
            )
        if not self.disk_access_time_ms > 0:
            raise ValidationError(
                f"disk_access_time_ms must be > 0, got {self.disk_access_time_ms}"
            )


def small_write_cost(workload: WorkloadParams, config: HraidConfig) -> float:
    """Average per-access cost x_avg in milliseconds.

    A read costs one disk access.  A small write updates the data strip and
    all (k+1)(l+1) - 1 check strips that cover it, each via a read-modify-
    write pair, so x_avg = [f_r + 2 f_w (k+1)(l+1)] x_d.  The network cost
    of shipping the data difference to other nodes is not modeled.
    """
    k, ell = config.k, config.ell
    return (
        workload.read_fraction
        + 2.0 * workload.write_fraction * (k + 1) * (ell + 1)
    ) * workload.disk_access_time_ms
