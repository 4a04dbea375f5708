"""Reversible HPP-style lattice gas in a two-chamber box.

Each cell carries four occupation bits, one per velocity (E, W, N, S).  The
box border and a vertical partition (with a hole of a few rows) are wall
cells.  One time step is ``F = stream . collide``:

* collide: a cell holding exactly an E+W pair becomes N+S and vice versa;
* stream: every particle moves one cell along its velocity, or, if the next
  cell is a wall, stays put with its velocity reversed.

Both maps are permutations of the occupied channels, so the dynamics is
exactly invertible on integer state.  The velocity-reversal operator is
``M = collide . R`` (``R`` swaps E<->W and N<->S in every cell).  It is an
involution with ``M F M = F^-1``, which makes the echo
``M F^T M F^T`` the identity, bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .thermo import box_entropy

E, W, N, S = 1, 2, 4, 8
# bit, reversed bit, axis, shift (rows grow southwards)
DIRECTIONS = ((E, W, 1, 1), (W, E, 1, -1), (N, S, 0, -1), (S, N, 0, 1))
EW, NS = E | W, N | S
POPCOUNT = np.array([bin(v).count("1") for v in range(16)], dtype=np.int64)


@dataclass(frozen=True)
class GasConfig:
    width: int = 64
    height: int = 64
    wall_col: int | None = None
    hole_rows: int = 4
    hole_start: int | None = None
    particles: int = 512
    seed: int = 0
    steps: int = 1000
    reverse_at: int | None = None
    init: str = "uniform"

    def __post_init__(self):
        if self.width < 4 or self.height < 3:
            raise ValidationError("grid must be at least 4 wide and 3 high")
        if self.wall_col is None:
            object.__setattr__(self, "wall_col", self.width // 2)
        if self.hole_start is None:
            object.__setattr__(self, "hole_start", (self.height - self.hole_rows) // 2)
        if not 2 <= self.wall_col <= self.width - 3:
            raise ValidationError(f"partition column {self.wall_col} must leave both chambers nonempty")
        if self.hole_rows < 0 or self.hole_start < 1 or self.hole_start + self.hole_rows > self.height - 1:
            raise ValidationError("hole must lie within the interior rows")
        if self.steps < 0:
            raise ValidationError("steps must be nonnegative")
        if self.reverse_at is not None and not 0 <= self.reverse_at <= self.steps:
            raise ValidationError("reverse_at must lie in [0, steps]")
        if self.init not in ("uniform", "symmetric"):
            raise ValidationError("init must be 'uniform' or 'symmetric'")
        cells = (self.height - 2) * (self.wall_col - 1)
        if not 0 <= self.particles <= 4 * cells:
            raise ValidationError(f"{self.particles} particles exceed left-chamber capacity {4 * cells}")
        if self.init == "symmetric" and self.particles % 4:
            raise ValidationError("symmetric initialization fills whole cells; particles must be a multiple of 4")

    @property
    def hole(self) -> tuple[int, ...]:
        return tuple(range(self.hole_start, self.hole_start + self.hole_rows))


def make_walls(cfg: GasConfig) -> np.ndarray:
    wall = np.zeros((cfg.height, cfg.width), dtype=bool)
    wall[0, :] = wall[-1, :] = True
    wall[:, 0] = wall[:, -1] = True
    wall[:, cfg.wall_col] = True
    wall[list(cfg.hole), cfg.wall_col] = False
    return wall


@dataclass(frozen=True, eq=False)
class MicroState:
    cells: np.ndarray  # uint8 [H, W], bit mask of occupied velocities
    wall: np.ndarray   # bool [H, W]
    wall_col: int
    hole: tuple[int, ...]

    def __eq__(self, other):
        if not isinstance(other, MicroState):
            return NotImplemented
        return (np.array_equal(self.cells, other.cells) and np.array_equal(self.wall, other.wall)
                and self.wall_col == other.wall_col and self.hole == other.hole)

    def _replace(self, cells: np.ndarray) -> "MicroState":
        return MicroState(cells, self.wall, self.wall_col, self.hole)

    @property
    def n(self) -> int:
        return int(POPCOUNT[self.cells].sum())

    def left_count(self) -> int:
        """Particles strictly left of the partition plus those inside hole cells."""
        return left_count(self.cells, self.wall_col, self.hole)

    def validate(self):
        if self.cells.dtype != np.uint8 or self.cells.shape != self.wall.shape:
            raise ValidationError("cells must be a uint8 array shaped like the wall mask")
        if np.any(self.cells > 15):
            raise ValidationError("cell occupancy uses only four bits")
        if np.any(self.cells[self.wall]):
            raise ValidationError("wall cell is occupied")


def left_count(cells: np.ndarray, wall_col: int, hole) -> int:
    j = POPCOUNT[cells[:, :wall_col]].sum()
    if hole:
        j += POPCOUNT[cells[list(hole), wall_col]].sum()
    return int(j)


def gas_init(cfg: GasConfig) -> MicroState:
    """Place ``cfg.particles`` in the left chamber, seeded and collision-free.

    ``init="uniform"`` samples channels uniformly without replacement.
    ``init="symmetric"`` samples whole cells and fills all four velocities,
    which makes the state its own velocity reversal.
    """
    wall = make_walls(cfg)
    left = np.zeros_like(wall)
    left[:, : cfg.wall_col] = True
    left &= ~wall
    ys, xs = np.nonzero(left)
    rng = np.random.default_rng(cfg.seed)
    cells = np.zeros(wall.shape, dtype=np.uint8)
    if cfg.init == "uniform":
        pick = rng.choice(4 * ys.size, size=cfg.particles, replace=False)
        cell, d = np.divmod(pick, 4)
        np.bitwise_or.at(cells, (ys[cell], xs[cell]), (1 << d).astype(np.uint8))
    else:
        pick = rng.choice(ys.size, size=cfg.particles // 4, replace=False)
        cells[ys[pick], xs[pick]] = E | W | N | S
    return MicroState(cells, wall, cfg.wall_col, cfg.hole)


@lru_cache(maxsize=8)
def _blocked_masks(wall_bytes: bytes, shape: tuple[int, int]):
    wall = np.frombuffer(wall_bytes, dtype=bool).reshape(shape)
    return tuple(np.roll(wall, -shift, axis=axis) for _, _, axis, shift in DIRECTIONS), ~wall


def _masks(wall: np.ndarray):
    return _blocked_masks(wall.tobytes(), wall.shape)


def _collide(cells: np.ndarray, open_cells: np.ndarray) -> np.ndarray:
    out = cells.copy()
    out[(cells == EW) & open_cells] = NS
    out[(cells == NS) & open_cells] = EW
    return out


def _stream(cells: np.ndarray, blocked) -> np.ndarray:
    out = np.zeros_like(cells)
    for (bit, rev, axis, shift), ahead in zip(DIRECTIONS, blocked):
        occ = (cells & bit) != 0
        bounce = occ & ahead
        move = occ & ~ahead
        out |= np.roll(move, shift, axis=axis).astype(np.uint8) * np.uint8(bit)
        out |= bounce.astype(np.uint8) * np.uint8(rev)
    return out


def _reflect(cells: np.ndarray) -> np.ndarray:
    return ((cells & E) << 1) | ((cells & W) >> 1) | ((cells & N) << 1) | ((cells & S) >> 1)


def collide(s: MicroState) -> MicroState:
    _, open_cells = _masks(s.wall)
    return s._replace(_collide(s.cells, open_cells))


def stream(s: MicroState) -> MicroState:
    blocked, _ = _masks(s.wall)
    return s._replace(_stream(s.cells, blocked))


def step_forward(s: MicroState, check: bool = False) -> MicroState:
    if check:
        s.validate()
    blocked, open_cells = _masks(s.wall)
    out = s._replace(_stream(_collide(s.cells, open_cells), blocked))
    if check:
        out.validate()
        if out.n != s.n:
            raise ValidationError(f"particle count changed from {s.n} to {out.n}")
    return out


def time_reverse(s: MicroState) -> MicroState:
    """``M = collide . R``: reverse every velocity, then undo the pending collision."""
    _, open_cells = _masks(s.wall)
    return s._replace(_collide(_reflect(s.cells), open_cells))


def step_backward(s: MicroState) -> MicroState:
    """Exact inverse of :func:`step_forward`, computed as ``M F M``."""
    return time_reverse(step_forward(time_reverse(s)))


def coarse_entropy(s: MicroState) -> float:
    """``ln C(n, j)`` from the chamber occupancy ``j``."""
    return box_entropy(s.n, s.left_count())


@dataclass
class Trajectory:
    """Per-step coarse-grained record; ``t``, ``j`` and ``entropy`` are aligned arrays."""

    n: int
    t: np.ndarray
    j: np.ndarray
    initial: MicroState
    final: MicroState
    entropy: np.ndarray = field(init=False)

    def __post_init__(self):
        table = np.array([box_entropy(self.n, k) for k in range(self.n + 1)])
        self.entropy = table[self.j]

    def rows(self):
        return zip(self.t.tolist(), self.j.tolist(), self.entropy.tolist())


def _evolve(state: MicroState, steps: int, j_out: np.ndarray, offset: int, check: bool) -> MicroState:
    """Advance ``steps`` times, writing ``j`` after each step into ``j_out[offset + k]``."""
    blocked, open_cells = _masks(state.wall)
    cells = state.cells
    n0 = state.n
    for k in range(1, steps + 1):
        cells = _stream(_collide(cells, open_cells), blocked)
        if check:
            nxt = state._replace(cells)
            nxt.validate()
            if nxt.n != n0:
                raise ValidationError(f"particle count changed at step {k}")
        j_out[offset + k] = left_count(cells, state.wall_col, state.hole)
    return state._replace(cells)


def simulate(cfg: GasConfig, initial: MicroState | None = None, check: bool = False) -> Trajectory:
    """Run ``cfg.steps`` forward steps, reversing velocities after ``cfg.reverse_at`` steps if set."""
    s0 = initial if initial is not None else gas_init(cfg)
    j = np.empty(cfg.steps + 1, dtype=np.int64)
    j[0] = s0.left_count()
    if cfg.reverse_at is None:
        final = _evolve(s0, cfg.steps, j, 0, check)
    else:
        mid = _evolve(s0, cfg.reverse_at, j, 0, check)
        final = _evolve(time_reverse(mid), cfg.steps - cfg.reverse_at, j, cfg.reverse_at, check)
    return Trajectory(s0.n, np.arange(cfg.steps + 1), j, s0, final)


def run_echo(cfg: GasConfig, initial: MicroState | None = None, check: bool = False) -> Trajectory:
    """Evolve ``T = cfg.steps``, reverse, evolve ``T`` more, reverse again.

    The returned trajectory has ``2T + 1`` records; its final state equals
    the initial state exactly.
    """
    if cfg.reverse_at != cfg.steps:
        raise ValidationError("echo run needs reverse_at equal to steps")
    T = cfg.steps
    s0 = initial if initial is not None else gas_init(cfg)
    j = np.empty(2 * T + 1, dtype=np.int64)
    j[0] = s0.left_count()
    mid = _evolve(s0, T, j, 0, check)
    end = _evolve(time_reverse(mid), T, j, T, check)
    return Trajectory(s0.n, np.arange(2 * T + 1), j, s0, time_reverse(end))


def run_past(cfg: GasConfig, initial: MicroState | None = None) -> Trajectory:
    """Reconstruct the history ``t = 0, -1, ..., -T`` by evolving the reversed state forward.

    Record ``k`` holds the state at time ``-k``; the final state is the
    actual configuration at ``-T`` (velocities restored).
    """
    T = cfg.steps
    s0 = initial if initial is not None else gas_init(cfg)
    j = np.empty(T + 1, dtype=np.int64)
    j[0] = s0.left_count()
    end = _evolve(time_reverse(s0), T, j, 0, False)
    return Trajectory(s0.n, -np.arange(T + 1), j, s0, time_reverse(end))
