"""Seeded scenario generators with planted structure.

Base data is i.i.d. standard normal from a PCG64 generator.  Streams are
split by spawn key: ``SeedSequence(entropy=seed, spawn_key=(k,))`` with
k = 0 for the base matrix and k = 1 for plant noise, so identical specs
yield bit-identical datasets.

Plants are defined post hoc: assertions about a planted feature recompute
the relevant statistic from the generated matrix, because planting a value
moves the mean and variance of its column.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .auxreg import PermutedFactors
from .decomposition import DecompositionITerm, decomposition_one
from .errors import BadSpec
from .leverage import LeverageRecord, leverage
from .linalg import DataMatrix, center

GENERATOR_NAME = "PCG64"
BASE_STREAM = 0
PLANT_STREAM = 1

# Noise scale for the rebuilt column in an aux-outlier plant: small against
# the unit-scale base columns so the planted offset dominates the auxiliary
# residuals without rescaling the column.
AUX_NOISE_SD = 0.05


def _stream(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))
    )


@dataclass(frozen=True)
class MarginalOutlier:
    """Set entry (row, col) to mean + z_target * std of its pre-plant column."""

    row: int
    col: int
    z_target: float


@dataclass(frozen=True)
class AuxOutlier:
    """Rebuild column ``col`` as the rowwise mean of the other columns plus
    small noise, then shift entry (row, col) by ``offset``."""

    row: int
    col: int
    offset: float


@dataclass(frozen=True)
class CollinearPair:
    """Rebuild column ``col_b`` as column ``col_a`` plus noise_sd * N(0,1)."""

    col_a: int
    col_b: int
    noise_sd: float


@dataclass(frozen=True)
class LeverageSweep:
    """Trajectory plant: the swept row is placed at mean + t * direction."""

    row: int
    direction: tuple[float, ...]
    t_values: tuple[float, ...]


Plant = MarginalOutlier | AuxOutlier | CollinearPair | LeverageSweep


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    n: int
    p: int
    plant: Plant | None = None

    def __post_init__(self):
        if self.n < 2 or self.p < 1:
            raise BadSpec("need n >= 2 and p >= 1")
        plant = self.plant
        if plant is None:
            return
        if isinstance(plant, MarginalOutlier):
            self._check_cell(plant.row, plant.col)
        elif isinstance(plant, AuxOutlier):
            self._check_cell(plant.row, plant.col)
            if self.p < 2:
                raise BadSpec("aux_outlier needs at least two regressors")
        elif isinstance(plant, CollinearPair):
            self._check_col(plant.col_a)
            self._check_col(plant.col_b)
            if plant.col_a == plant.col_b:
                raise BadSpec("collinear_pair columns must differ")
            if self.p < 2:
                raise BadSpec("collinear_pair needs at least two regressors")
            if not plant.noise_sd >= 0.0:
                raise BadSpec("noise_sd must be nonnegative")
        elif isinstance(plant, LeverageSweep):
            if not 0 <= plant.row < self.n:
                raise BadSpec(f"row {plant.row} outside 0..{self.n - 1}")
            d = np.asarray(plant.direction, dtype=np.float64)
            if d.shape != (self.p,):
                raise BadSpec(f"direction must have length {self.p}")
            if not np.isfinite(d).all() or not np.any(d != 0.0):
                raise BadSpec("direction must be finite and nonzero")
            t = np.asarray(plant.t_values, dtype=np.float64)
            if t.size == 0 or not np.isfinite(t).all():
                raise BadSpec("t_values must be nonempty and finite")
        else:
            raise BadSpec(f"unknown plant {plant!r}")

    def _check_cell(self, row: int, col: int) -> None:
        if not 0 <= row < self.n:
            raise BadSpec(f"row {row} outside 0..{self.n - 1}")
        self._check_col(col)

    def _check_col(self, col: int) -> None:
        if not 0 <= col < self.p:
            raise BadSpec(f"column {col} outside 0..{self.p - 1}")


def column_names(p: int) -> tuple[str, ...]:
    return tuple(f"x{j}" for j in range(p))


def generate(spec: ScenarioSpec) -> DataMatrix:
    """Deterministic dataset for a scenario.

    A leverage_sweep plant leaves the base matrix untouched here; the
    trajectory itself comes from ``sweep_leverage`` (the CLI writes the
    dataset at the final t value).
    """
    vals = _stream(spec.seed, BASE_STREAM).standard_normal((spec.n, spec.p))
    plant = spec.plant
    if isinstance(plant, MarginalOutlier):
        col = vals[:, plant.col]
        vals[plant.row, plant.col] = col.mean() + plant.z_target * col.std()
    elif isinstance(plant, AuxOutlier):
        others = [j for j in range(spec.p) if j != plant.col]
        noise = _stream(spec.seed, PLANT_STREAM).standard_normal(spec.n)
        vals[:, plant.col] = vals[:, others].mean(axis=1) + AUX_NOISE_SD * noise
        vals[plant.row, plant.col] += plant.offset
    elif isinstance(plant, CollinearPair):
        noise = _stream(spec.seed, PLANT_STREAM).standard_normal(spec.n)
        vals[:, plant.col_b] = vals[:, plant.col_a] + plant.noise_sd * noise
    return DataMatrix(vals, column_names(spec.p))


@dataclass(frozen=True)
class SweepPoint:
    t: float
    record: LeverageRecord
    terms: tuple[DecompositionITerm, ...]


def dataset_at(
    base: DataMatrix, row: int, direction: np.ndarray, t: float
) -> DataMatrix:
    """Copy of ``base`` with ``row`` placed at mean + t * direction.

    The mean is the post-replacement column mean (fixed point of the
    replacement), so the swept row sits exactly at the stated offset from
    the mean of the modified dataset.
    """
    vals = np.array(base.values)
    n = vals.shape[0]
    others = vals.sum(axis=0) - vals[row]
    mean = (others + t * direction) / (n - 1)
    vals[row] = mean + t * direction
    return DataMatrix(vals, base.column_names)


def sweep_trajectory(
    base: DataMatrix,
    row: int,
    direction,
    t_values,
    threshold: float | None = None,
) -> list[SweepPoint]:
    """Diagnostics trajectory of one row swept along a direction."""
    d = np.asarray(direction, dtype=np.float64)
    if d.shape != (base.p,) or not np.any(d != 0.0):
        raise BadSpec("direction must be a nonzero length-p vector")
    if not 0 <= row < base.n:
        raise BadSpec(f"row {row} outside 0..{base.n - 1}")
    points = []
    for t in t_values:
        data = dataset_at(base, row, d, float(t))
        cen = center(data)
        factors = PermutedFactors(cen)
        rec = leverage(cen, factors.base, row, threshold)
        terms = tuple(decomposition_one(cen, row, factors))
        points.append(SweepPoint(float(t), rec, terms))
    return points


def sweep_leverage(spec: ScenarioSpec) -> list[SweepPoint]:
    """Trajectory for a leverage_sweep scenario over its seeded base matrix."""
    plant = spec.plant
    if not isinstance(plant, LeverageSweep):
        raise BadSpec("sweep_leverage needs a leverage_sweep plant")
    base = generate(replace(spec, plant=None))
    return sweep_trajectory(base, plant.row, plant.direction, plant.t_values)


# --- scenario config files (plain key = value lines) ---

_PLANT_KEYS = {
    "none": set(),
    "marginal_outlier": {"row", "col", "z_target"},
    "aux_outlier": {"row", "col", "offset"},
    "collinear_pair": {"col_a", "col_b", "noise_sd"},
    "leverage_sweep": {"row", "direction", "t_values"},
}


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise BadSpec(f"{key}: expected an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise BadSpec(f"{key}: expected a number, got {raw!r}") from None
    if not np.isfinite(v):
        raise BadSpec(f"{key}: must be finite")
    return v


def _parse_floats(key: str, raw: str) -> tuple[float, ...]:
    return tuple(_parse_float(key, tok) for tok in raw.split(","))


def parse_scenario(text: str) -> ScenarioSpec:
    """Parse a scenario config: ``key = value`` lines, '#' comments allowed."""
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise BadSpec(f"line {lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key in fields:
            raise BadSpec(f"line {lineno}: duplicate key {key!r}")
        fields[key] = raw

    for required in ("seed", "n", "p"):
        if required not in fields:
            raise BadSpec(f"missing required key {required!r}")
    kind = fields.pop("plant", "none")
    if kind not in _PLANT_KEYS:
        raise BadSpec(f"unknown plant kind {kind!r}")
    seed = _parse_int("seed", fields.pop("seed"))
    n = _parse_int("n", fields.pop("n"))
    p = _parse_int("p", fields.pop("p"))
    expected = _PLANT_KEYS[kind]
    if set(fields) != expected:
        raise BadSpec(
            f"plant {kind!r} needs keys {sorted(expected)}, got {sorted(fields)}"
        )

    plant: Plant | None = None
    if kind == "marginal_outlier":
        plant = MarginalOutlier(
            _parse_int("row", fields["row"]),
            _parse_int("col", fields["col"]),
            _parse_float("z_target", fields["z_target"]),
        )
    elif kind == "aux_outlier":
        plant = AuxOutlier(
            _parse_int("row", fields["row"]),
            _parse_int("col", fields["col"]),
            _parse_float("offset", fields["offset"]),
        )
    elif kind == "collinear_pair":
        plant = CollinearPair(
            _parse_int("col_a", fields["col_a"]),
            _parse_int("col_b", fields["col_b"]),
            _parse_float("noise_sd", fields["noise_sd"]),
        )
    elif kind == "leverage_sweep":
        plant = LeverageSweep(
            _parse_int("row", fields["row"]),
            _parse_floats("direction", fields["direction"]),
            _parse_floats("t_values", fields["t_values"]),
        )
    return ScenarioSpec(seed=seed, n=n, p=p, plant=plant)


def scenario_to_text(spec: ScenarioSpec) -> str:
    lines = [f"seed = {spec.seed}", f"n = {spec.n}", f"p = {spec.p}"]
    plant = spec.plant
    if plant is None:
        lines.append("plant = none")
    elif isinstance(plant, MarginalOutlier):
        lines += [
            "plant = marginal_outlier",
            f"row = {plant.row}",
            f"col = {plant.col}",
            f"z_target = {plant.z_target!r}",
        ]
    elif isinstance(plant, AuxOutlier):
        lines += [
            "plant = aux_outlier",
            f"row = {plant.row}",
            f"col = {plant.col}",
            f"offset = {plant.offset!r}",
        ]
    elif isinstance(plant, CollinearPair):
        lines += [
            "plant = collinear_pair",
            f"col_a = {plant.col_a}",
            f"col_b = {plant.col_b}",
            f"noise_sd = {plant.noise_sd!r}",
        ]
    elif isinstance(plant, LeverageSweep):
        lines += [
            "plant = leverage_sweep",
            f"row = {plant.row}",
            "direction = " + ",".join(repr(float(v)) for v in plant.direction),
            "t_values = " + ",".join(repr(float(v)) for v in plant.t_values),
        ]
    return "\n".join(lines) + "\n"


def provenance(spec: ScenarioSpec) -> dict:
    """Generator identification recorded alongside emitted datasets."""
    return {
        "generator": GENERATOR_NAME,
        "seed": spec.seed,
        "stream_rule": "SeedSequence(entropy=seed, spawn_key=(k,)); k=0 base, k=1 plant noise",
    }
