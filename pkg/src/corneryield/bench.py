"""Synthetic multi-corner circuit benchmarks with known ground truth.

Each problem is a deterministic performance function f(x, corner) over a
standardized Gaussian process-variation vector x, together with per-corner
pass thresholds calibrated so that the true yield of every corner lands in a
requested band.  Affine problems admit exact (analytic) yields; nonlinear
problems fall back to large-sample Monte Carlo.  These stand in for circuit
simulation so every downstream estimate can be checked against ground truth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import norm

PROBLEM_FORMAT_VERSION = 1

# (id, voltage V, temperature C) for the default five-corner set.
DEFAULT_CORNER_TABLE: tuple[tuple[str, float, float], ...] = (
    ("TT", 1.0, 25.0),
    ("FF", 1.1, 0.0),
    ("SF", 1.0, 25.0),
    ("FS", 1.0, 25.0),
    ("SS", 0.9, 125.0),
)

DEFAULT_YIELD_BAND: tuple[float, float] = (0.55, 0.95)

# Spread of linear weight magnitudes inside the support (log-uniform range).
# A wide spread makes some critical parameters much weaker than others, which
# is what makes the selection problem nontrivial at high dimension.
_WEIGHT_MAG_RANGE = (0.05, 1.0)
# Relative variance contributed by interaction / quadratic terms when enabled.
_INTERACTION_SCALE = 0.5
_QUADRATIC_SCALE = 0.35
# Intercept spread across corners at full decorrelation.
_INTERCEPT_SPREAD = 0.5

_CALIBRATION_SAMPLES = 200_000
_CALIBRATION_TOL = 0.002  # 0.2 percentage points of yield


class GenerationError(ValueError):
    """Raised when a problem cannot be generated as requested."""


class UnknownCornerError(KeyError):
    """Raised when a corner id does not exist in the problem."""


class AnalyticModeError(ValueError):
    """Raised when an analytic yield is requested for a nonlinear evaluator."""


@dataclass(frozen=True)
class CornerSpec:
    """One operating corner: an id plus its normalized (voltage, temperature)."""

    id: str
    voltage: float
    temperature: float
    encoding: np.ndarray

    def __post_init__(self):
        enc = np.asarray(self.encoding, dtype=float)
        if enc.ndim != 1 or enc.size < 1:
            raise ValueError("corner encoding must be a nonempty 1-D vector")
        object.__setattr__(self, "encoding", enc)


@dataclass(frozen=True)
class VariationModel:
    """Independent standard Gaussian process variation in D dimensions."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal((n, self.dimension))


@dataclass(frozen=True)
class SramLikeFamily:
    """Generator parameters for a sparse multi-corner benchmark family.

    ``rho`` couples the per-corner weight vectors: pairwise cosine similarity
    of the linear weights is guaranteed to be at least ``rho``, and at
    ``rho == 1`` all corners share one function.  ``yield_bands`` maps corner
    id to the (lo, hi) band its true yield must land in; corners not listed
    use ``default_band``.
    """

    D: int
    s: int
    rho: float = 0.9
    quadratic: bool = False
    interactions: bool = False
    corners: tuple[tuple[str, float, float], ...] = DEFAULT_CORNER_TABLE
    yield_bands: dict[str, tuple[float, float]] = field(default_factory=dict)
    default_band: tuple[float, float] = DEFAULT_YIELD_BAND

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("support size s must be >= 1")
        if self.D < self.s:
            raise ValueError("D must be >= s")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        ids = [c[0] for c in self.corners]
        if len(set(ids)) != len(ids):
            raise ValueError("corner ids must be unique")

    @property
    def affine(self) -> bool:
        return not (self.quadratic or self.interactions)

    def band_for(self, corner_id: str) -> tuple[float, float]:
        return tuple(self.yield_bands.get(corner_id, self.default_band))

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "s": self.s,
            "rho": self.rho,
            "quadratic": self.quadratic,
            "interactions": self.interactions,
            "corners": [list(c) for c in self.corners],
            "yield_bands": {k: list(v) for k, v in self.yield_bands.items()},
            "default_band": list(self.default_band),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SramLikeFamily":
        return cls(
            D=int(d["D"]),
            s=int(d["s"]),
            rho=float(d.get("rho", 0.9)),
            quadratic=bool(d.get("quadratic", False)),
            interactions=bool(d.get("interactions", False)),
            corners=tuple(
                (str(c[0]), float(c[1]), float(c[2])) for c in d.get("corners", DEFAULT_CORNER_TABLE)
            ),
            yield_bands={str(k): (float(v[0]), float(v[1])) for k, v in d.get("yield_bands", {}).items()},
            default_band=tuple(d.get("default_band", DEFAULT_YIELD_BAND)),
        )


@dataclass(frozen=True)
class CornerFunction:
    """Deterministic performance function of one corner.

    f(x) = bias + linear . x_S  [+ sum_{i<j} inter_ij x_i x_j + sum_i quad_i x_i^2]
    with every term supported on the problem's critical subset S.
    """

    bias: float
    linear: np.ndarray        # (s,) weights over support coords
    inter: np.ndarray | None  # (s*(s-1)//2,) upper-triangle coefficients
    quad: np.ndarray | None   # (s,) coefficients

    @property
    def is_affine(self) -> bool:
        return self.inter is None and self.quad is None

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate on already support-projected rows ``xs`` of shape (n, s)."""
        y = self.bias + xs @ self.linear
        if self.inter is not None:
            iu, ju = np.triu_indices(xs.shape[1], k=1)
            y = y + (xs[:, iu] * xs[:, ju]) @ self.inter
        if self.quad is not None:
            y = y + (xs * xs) @ self.quad
        return y


@dataclass(frozen=True)
class GoldenYield:
    value: float
    std_error: float
    provenance: str  # "analytic" | "brute-force"


@dataclass
class BenchmarkProblem:
    """A generated multi-corner problem with ground-truth yields attached."""

    variation: VariationModel
    corners: list[CornerSpec]
    specs: dict[str, float]
    functions: dict[str, CornerFunction]
    true_support: np.ndarray          # sorted 0-based critical dimensions
    golden_yields: dict[str, GoldenYield]
    family: SramLikeFamily
    seed: int

    @property
    def dimension(self) -> int:
        return self.variation.dimension

    @property
    def encoding_length(self) -> int:
        return self.corners[0].encoding.size

    @property
    def corner_ids(self) -> list[str]:
        return [c.id for c in self.corners]

    def corner(self, corner_id: str) -> CornerSpec:
        for c in self.corners:
            if c.id == corner_id:
                return c
        raise UnknownCornerError(corner_id)

    def encoding_for(self, corner_id: str) -> np.ndarray:
        return self.corner(corner_id).encoding

    def is_affine(self, corner_id: str | None = None) -> bool:
        if corner_id is not None:
            return self.functions[corner_id].is_affine
        return all(f.is_affine for f in self.functions.values())

    def evaluate(self, X: np.ndarray, corner_id: str) -> np.ndarray:
        """Deterministic performance of rows of X (n, D) at one corner."""
        if corner_id not in self.functions:
            raise UnknownCornerError(corner_id)
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise ValueError(
                f"expected {self.dimension} process parameters, got {X.shape[1]}"
            )
        return self.functions[corner_id].evaluate(X[:, self.true_support])


def corner_encodings(table) -> list[np.ndarray]:
    """Rescale (voltage, temperature) affinely to [-1, 1] over the corner set.

    A degenerate axis (all corners share the value) maps to 0.
    """
    volts = np.array([row[1] for row in table], dtype=float)
    temps = np.array([row[2] for row in table], dtype=float)

    def rescale(v):
        lo, hi = v.min(), v.max()
        if hi == lo:
            return np.zeros_like(v)
        return 2.0 * (v - lo) / (hi - lo) - 1.0

    ev, et = rescale(volts), rescale(temps)
    return [np.array([ev[i], et[i]]) for i in range(len(table))]


def _coupled_vectors(base: np.ndarray, n: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """n unit vectors whose pairwise cosine similarity is guaranteed >= rho.

    Each vector mixes the shared direction ``base`` with an orthogonal
    perturbation: w_k = a*u + sqrt(1-a^2)*v_k with a^2 = (1+rho)/2, so even
    antipodal perturbations keep the pairwise cosine at rho.
    """
    s = base.size
    u = base / np.linalg.norm(base)
    a = math.sqrt((1.0 + rho) / 2.0)
    out = np.empty((n, s))
    for k in range(n):
        if rho >= 1.0 or s == 1:
            out[k] = u
            continue
        v = rng.standard_normal(s)
        v -= (v @ u) * u
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            out[k] = u
            continue
        out[k] = a * u + math.sqrt(1.0 - a * a) * (v / nv)
    return out


def _coupled_values(base: np.ndarray, n: int, rho: float, scale: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Per-corner coefficient sets sharing ``base`` up to rho-coupling."""
    a = math.sqrt((1.0 + rho) / 2.0)
    mix = math.sqrt(1.0 - a * a)
    out = np.empty((n, base.size))
    for k in range(n):
        pert = rng.standard_normal(base.size) if mix > 0 else 0.0
        out[k] = scale * (a * base + mix * pert)
    return out


def _calibrate_affine_spec(bias: float, wnorm: float, target: float, corner_id: str) -> float:
    """Spec with exact yield = target for f = bias + w.x, x ~ N(0, I)."""
    q = norm.ppf(target)
    if not np.isfinite(q) or abs(q) > 6.0:
        raise GenerationError(
            f"corner {corner_id}: target yield {target} puts the spec outside "
            "+-6 sigma of the performance distribution"
        )
    return bias - wnorm * q


def _calibrate_empirical_spec(values: np.ndarray, target: float, corner_id: str) -> float:
    """Bisect the spec on a fixed sample until the empirical yield hits target.

    Deterministic given ``values``; converges to within _CALIBRATION_TOL of
    the target or raises if the target is unreachable within +-6 sigma.
    """
    mu, sd = values.mean(), values.std()
    lo, hi = mu - 6.0 * sd, mu + 6.0 * sd
    y_lo = float(np.mean(values > lo))
    y_hi = float(np.mean(values > hi))
    if not (y_hi <= target <= y_lo):
        raise GenerationError(
            f"corner {corner_id}: target yield {target} cannot be placed "
            "within +-6 sigma of the performance distribution"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        y_mid = float(np.mean(values > mid))
        if abs(y_mid - target) <= _CALIBRATION_TOL:
            return mid
        if y_mid > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generate_problem(family: SramLikeFamily, seed: int) -> BenchmarkProblem:
    """Generate a seeded benchmark problem from a family description.

    The affine form is f(x, c) = b(c) + w(c).x with w(c) supported on a
    random critical subset of size s; weight magnitudes are spread
    log-uniformly so some critical parameters are much weaker than others.
    Specs are calibrated so each corner's true yield lands in its band.
    """
    ss = np.random.SeedSequence([int(seed), 0x0BE7C4])
    rng_struct, rng_cal, rng_gold = [np.random.default_rng(s) for s in ss.spawn(3)]

    D, s = family.D, family.s
    support = np.sort(rng_struct.choice(D, size=s, replace=False))

    mags = np.exp(rng_struct.uniform(math.log(_WEIGHT_MAG_RANGE[0]),
                                     math.log(_WEIGHT_MAG_RANGE[1]), size=s))
    signs = rng_struct.choice((-1.0, 1.0), size=s)
    base_dir = signs * mags

    K = len(family.corners)
    weights = _coupled_vectors(base_dir, K, family.rho, rng_struct)
    b0 = rng_struct.normal(0.0, 0.5)
    mix = math.sqrt(1.0 - (1.0 + family.rho) / 2.0)
    biases = b0 + _INTERCEPT_SPREAD * mix * rng_struct.standard_normal(K)

    inter = quad = None
    if family.interactions and s >= 2:
        npairs = s * (s - 1) // 2
        inter = _coupled_values(rng_struct.standard_normal(npairs), K, family.rho,
                                _INTERACTION_SCALE / math.sqrt(npairs), rng_struct)
    if family.quadratic:
        quad = _coupled_values(rng_struct.standard_normal(s), K, family.rho,
                               _QUADRATIC_SCALE / math.sqrt(s), rng_struct)

    encs = corner_encodings(family.corners)
    corners = [
        CornerSpec(id=row[0], voltage=row[1], temperature=row[2], encoding=encs[i])
        for i, row in enumerate(family.corners)
    ]

    functions = {}
    for k, c in enumerate(corners):
        functions[c.id] = CornerFunction(
            bias=float(biases[k]),
            linear=weights[k].copy(),
            inter=None if inter is None else inter[k].copy(),
            quad=None if quad is None else quad[k].copy(),
        )

    # Calibrate one spec per corner against its requested band midpoint.
    specs: dict[str, float] = {}
    cal_x = rng_cal.standard_normal((_CALIBRATION_SAMPLES, s)) if not family.affine else None
    for k, c in enumerate(corners):
        lo, hi = family.band_for(c.id)
        if not (0.0 <= lo <= hi <= 1.0):
            raise GenerationError(f"corner {c.id}: invalid yield band ({lo}, {hi})")
        target = 0.5 * (lo + hi)
        fn = functions[c.id]
        if fn.is_affine:
            specs[c.id] = _calibrate_affine_spec(
                fn.bias, float(np.linalg.norm(fn.linear)), target, c.id)
        else:
            specs[c.id] = _calibrate_empirical_spec(fn.evaluate(cal_x), target, c.id)

    problem = BenchmarkProblem(
        variation=VariationModel(D),
        corners=corners,
        specs=specs,
        functions=functions,
        true_support=support,
        golden_yields={},
        family=family,
        seed=int(seed),
    )
    for c in corners:
        mode = "analytic" if problem.is_affine(c.id) else "brute-force"
        problem.golden_yields[c.id] = golden_yield(problem, c.id, mode=mode, rng=rng_gold)
    return problem


def golden_yield(problem: BenchmarkProblem, corner_id: str, mode: str = "analytic",
                 m_gold: int = 1_000_000, rng: np.random.Generator | None = None,
                 seed: int = 0) -> GoldenYield:
    """Ground-truth yield of one corner.

    ``analytic`` gives the exact Gaussian tail probability
    P(b + w.x > spec) = Phi((b - spec)/||w||) and requires an affine corner;
    ``brute-force`` estimates over m_gold fresh samples and reports the
    binomial standard error.
    """
    fn = problem.functions.get(corner_id)
    if fn is None:
        raise UnknownCornerError(corner_id)
    spec = problem.specs[corner_id]
    if mode == "analytic":
        if not fn.is_affine:
            raise AnalyticModeError(
                f"corner {corner_id} has a nonlinear evaluator; analytic mode "
                "applies to affine corners only"
            )
        wnorm = float(np.linalg.norm(fn.linear))
        if wnorm == 0.0:
            val = 1.0 if fn.bias > spec else 0.0
        else:
            val = float(norm.cdf((fn.bias - spec) / wnorm))
        return GoldenYield(value=val, std_error=0.0, provenance="analytic")
    if mode == "brute-force":
        if m_gold < 1:
            raise ValueError("m_gold must be positive")
        if rng is None:
            rng = np.random.default_rng(np.random.SeedSequence([problem.seed, 0x601D, int(seed)]))
        hits = 0
        chunk = 200_000
        done = 0
        while done < m_gold:
            m = min(chunk, m_gold - done)
            xs = rng.standard_normal((m, problem.true_support.size))
            hits += int(np.sum(fn.evaluate(xs) > spec))
            done += m
        val = hits / m_gold
        se = math.sqrt(max(val * (1.0 - val), 1e-12) / m_gold)
        return GoldenYield(value=val, std_error=se, provenance="brute-force")
    raise ValueError(f"unknown golden-yield mode: {mode!r}")


def evaluate_batch(problem: BenchmarkProblem, points) -> np.ndarray:
    """Evaluate a sequence of (x, corner_id) pairs, positionally aligned.

    Pure function of its inputs: duplicated points give identical results.
    """
    points = list(points)
    if not points:
        return np.empty(0)
    out = np.empty(len(points))
    by_corner: dict[str, list[int]] = {}
    for i, (x, cid) in enumerate(points):
        x = np.asarray(x, dtype=float)
        if x.shape != (problem.dimension,):
            raise ValueError(
                f"point {i}: expected shape ({problem.dimension},), got {x.shape}"
            )
        if cid not in problem.functions:
            raise UnknownCornerError(cid)
        by_corner.setdefault(cid, []).append(i)
    for cid, idxs in by_corner.items():
        X = np.stack([np.asarray(points[i][0], dtype=float) for i in idxs])
        out[idxs] = problem.evaluate(X, cid)
    return out


def save_problem(problem: BenchmarkProblem, path) -> None:
    """Write a problem to a JSON document that round-trips losslessly."""
    doc = {
        "format_version": PROBLEM_FORMAT_VERSION,
        "seed": problem.seed,
        "family": problem.family.to_dict(),
        "corners": [
            {"id": c.id, "voltage": c.voltage, "temperature": c.temperature,
             "encoding": c.encoding.tolist()}
            for c in problem.corners
        ],
        "specs": problem.specs,
        "support": problem.true_support.tolist(),
        "functions": {
            cid: {
                "bias": fn.bias,
                "linear": fn.linear.tolist(),
                "inter": None if fn.inter is None else fn.inter.tolist(),
                "quad": None if fn.quad is None else fn.quad.tolist(),
            }
            for cid, fn in problem.functions.items()
        },
        "golden_yields": {
            cid: {"value": g.value, "std_error": g.std_error, "provenance": g.provenance}
            for cid, g in problem.golden_yields.items()
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_problem(path) -> BenchmarkProblem:
    doc = json.loads(Path(path).read_text())
    if doc.get("format_version") != PROBLEM_FORMAT_VERSION:
        raise ValueError(f"unsupported problem format: {doc.get('format_version')}")
    family = SramLikeFamily.from_dict(doc["family"])
    corners = [
        CornerSpec(id=c["id"], voltage=float(c["voltage"]),
                   temperature=float(c["temperature"]),
                   encoding=np.array(c["encoding"], dtype=float))
        for c in doc["corners"]
    ]
    functions = {
        cid: CornerFunction(
            bias=float(fd["bias"]),
            linear=np.array(fd["linear"], dtype=float),
            inter=None if fd["inter"] is None else np.array(fd["inter"], dtype=float),
            quad=None if fd["quad"] is None else np.array(fd["quad"], dtype=float),
        )
        for cid, fd in doc["functions"].items()
    }
    golden = {
        cid: GoldenYield(value=float(g["value"]), std_error=float(g["std_error"]),
                         provenance=g["provenance"])
        for cid, g in doc["golden_yields"].items()
    }
    return BenchmarkProblem(
        variation=VariationModel(family.D),
        corners=corners,
        specs={k: float(v) for k, v in doc["specs"].items()},
        functions=functions,
        true_support=np.array(doc["support"], dtype=int),
        golden_yields=golden,
        family=family,
        seed=int(doc["seed"]),
    )
