"""
Desk benchmark suite.

Standard base functions composed with a seeded shift ``o``, a seeded
orthogonal rotation ``M`` and a bias ``f*``:

    f(x) = f_base(M (x - o)) + f*

The official CEC 2017 data files are not used; shifts and rotations come
from :class:`~yiopt.core.RngStream` seeded by ``(suite seed, problem id,
dim)``, so every instance is reproducible from its manifest line.

Base functions (``z`` is the transformed point, ``D`` its length):

=============  ==========================================================  ==========
id             formula                                                     minimum
=============  ==========================================================  ==========
sphere         sum z_i^2                                                   0 at 0
bent_cigar     z_1^2 + 1e6 sum_{i>=2} z_i^2                                0 at 0
zakharov       sum z_i^2 + s^2 + s^4,  s = sum 0.5 i z_i                   0 at 0
rosenbrock     sum_{i<D} 100 (z_{i+1} - z_i^2)^2 + (z_i - 1)^2  (D >= 2)   0 at 1
rastrigin      sum z_i^2 - 10 cos(2 pi z_i) + 10                           0 at 0
levy           w = 1 + (z - 1)/4;  sin^2(pi w_1)                           0 at 1
               + sum_{i<D} (w_i - 1)^2 (1 + 10 sin^2(pi w_i + 1))
               + (w_D - 1)^2 (1 + sin^2(2 pi w_D))
schaffer_f7    (mean_{i<D} sqrt(s_i) (1 + sin^2(50 s_i^0.2)))^2,           0 at 0
               s_i = sqrt(z_i^2 + z_{i+1}^2)  (D >= 2)
ackley         -20 exp(-0.2 sqrt(mean z^2)) - exp(mean cos(2 pi z)) + 20 + e  0 at 0
griewank       sum z_i^2 / 4000 - prod cos(z_i / sqrt(i)) + 1              0 at 0
schwefel       sum c - g(z_i + 420.9687...),  bounded variant (see below)  0 at 0
elliptic       sum 1e6^((i-1)/(D-1)) z_i^2                                 0 at 0
discus         1e6 z_1^2 + sum_{i>=2} z_i^2                                0 at 0
=============  ==========================================================  ==========

``schwefel`` uses the bounded variant of the CEC suites: with
``y = z + 420.9687462275036``, ``g(y) = y sin(sqrt|y|)`` for ``|y| <= 500``
and a folded, quadratically penalized value outside, so that it stays
non-negative on any box. The constant ``c = g(420.9687462275036)`` makes the
value at ``z = 0`` exactly zero.

For ``rosenbrock`` and ``levy`` the minimum sits at ``z = 1``, so the
problem optimum is ``x* = o + M^T 1``; for all others it is ``x* = o``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ContractViolation, RngStream, SearchSpace, fnv1a_64

__all__ = ["BASE_FUNCTIONS", "BenchmarkProblem", "CompositionProblem",
           "DEFAULT_SUITE", "ManifestEntry", "error_value", "evaluate_base",
           "evaluate_problem", "make_problem", "random_orthogonal",
           "read_manifest", "suite_from_manifest", "write_manifest"]

_SCHWEFEL_SHIFT = 420.9687462275036
_SCHWEFEL_PEAK = _SCHWEFEL_SHIFT * np.sin(np.sqrt(_SCHWEFEL_SHIFT))


def _sphere(z):
    return np.sum(z * z, axis=-1)


def _bent_cigar(z):
    return z[..., 0] ** 2 + 1e6 * np.sum(z[..., 1:] ** 2, axis=-1)


def _discus(z):
    return 1e6 * z[..., 0] ** 2 + np.sum(z[..., 1:] ** 2, axis=-1)


def _zakharov(z):
    i = np.arange(1, z.shape[-1] + 1)
    s = np.sum(0.5 * i * z, axis=-1)
    return np.sum(z * z, axis=-1) + s ** 2 + s ** 4


def _rosenbrock(z):
    a, b = z[..., :-1], z[..., 1:]
    return np.sum(100.0 * (b - a * a) ** 2 + (a - 1.0) ** 2, axis=-1)


def _rastrigin(z):
    return np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=-1)


def _levy(z):
    w = 1.0 + (z - 1.0) / 4.0
    head = np.sin(np.pi * w[..., 0]) ** 2
    mid = np.sum((w[..., :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[..., :-1] + 1.0) ** 2),
                 axis=-1)
    tail = (w[..., -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[..., -1]) ** 2)
    return head + mid + tail


def _schaffer_f7(z):
    s = np.sqrt(z[..., :-1] ** 2 + z[..., 1:] ** 2)
    r = np.sqrt(s) * (1.0 + np.sin(50.0 * s ** 0.2) ** 2)
    return np.mean(r, axis=-1) ** 2


def _ackley(z):
    d = z.shape[-1]
    a = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(z * z, axis=-1) / d))
    b = -np.exp(np.sum(np.cos(2.0 * np.pi * z), axis=-1) / d)
    return a + b + 20.0 + np.e


def _griewank(z):
    i = np.sqrt(np.arange(1, z.shape[-1] + 1))
    return np.sum(z * z, axis=-1) / 4000.0 - np.prod(np.cos(z / i), axis=-1) + 1.0


def _schwefel(z):
    d = z.shape[-1]
    y = z + _SCHWEFEL_SHIFT
    g = y * np.sin(np.sqrt(np.abs(y)))
    m = np.fmod(np.abs(y), 500.0)
    hi = (500.0 - m) * np.sin(np.sqrt(500.0 - m)) - (y - 500.0) ** 2 / (10000.0 * d)
    lo = (m - 500.0) * np.sin(np.sqrt(500.0 - m)) - (y + 500.0) ** 2 / (10000.0 * d)
    g = np.where(y > 500.0, hi, np.where(y < -500.0, lo, g))
    return np.sum(_SCHWEFEL_PEAK - g, axis=-1)


def _elliptic(z):
    d = z.shape[-1]
    if d == 1:
        return np.sum(z * z, axis=-1)
    w = 1e6 ** (np.arange(d) / (d - 1))
    return np.sum(w * z * z, axis=-1)


@dataclass(frozen=True)
class BaseFunction:
    name: str
    fn: object
    min_dim: int = 1
    optimum_at_one: bool = False

    def optimum(self, dim: int) -> np.ndarray:
        return np.ones(dim) if self.optimum_at_one else np.zeros(dim)


BASE_FUNCTIONS = {
    b.name: b for b in (
        BaseFunction("sphere", _sphere),
        BaseFunction("bent_cigar", _bent_cigar),
        BaseFunction("zakharov", _zakharov),
        BaseFunction("rosenbrock", _rosenbrock, 2, True),
        BaseFunction("rastrigin", _rastrigin),
        BaseFunction("levy", _levy, 1, True),
        BaseFunction("schaffer_f7", _schaffer_f7, 2),
        BaseFunction("ackley", _ackley),
        BaseFunction("griewank", _griewank),
        BaseFunction("schwefel", _schwefel),
        BaseFunction("elliptic", _elliptic),
        BaseFunction("discus", _discus),
    )
}


def _base(name: str) -> BaseFunction:
    try:
        return BASE_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown base function {name!r}") from None


def evaluate_base(name: str, z) -> float | np.ndarray:
    """Evaluate a base function on a vector, or row-wise on a 2-D array."""
    base = _base(name)
    z = np.asarray(z, dtype=float)
    if z.shape[-1] < base.min_dim:
        raise ValueError(f"{name} needs dim >= {base.min_dim}, got {z.shape[-1]}")
    out = base.fn(z)
    return float(out) if z.ndim == 1 else out


def random_orthogonal(dim: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed orthogonal matrix from a QR of a Gaussian matrix."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    q, r = np.linalg.qr(rng.normal((dim, dim)))
    # sign fix makes the distribution uniform and the result unique per draw
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


class BenchmarkProblem:
    """
    Shifted, rotated and biased base function.

    Instances are immutable once built and callable on a single vector;
    :meth:`batch` evaluates the rows of a 2-D array.
    """

    def __init__(self, base: str, dim: int, *, shift=None, rotation=None,
                 bias: float = 0.0, space: Optional[SearchSpace] = None,
                 name: Optional[str] = None):
        self.base = _base(base)
        if dim < self.base.min_dim:
            raise ValueError(f"{base} needs dim >= {self.base.min_dim}")
        self.dim = int(dim)
        self.shift = np.zeros(dim) if shift is None else np.asarray(shift, dtype=float)
        self.rotation = None if rotation is None else np.asarray(rotation, dtype=float)
        if self.shift.shape != (dim,):
            raise ValueError("shift must have length dim")
        if self.rotation is not None and self.rotation.shape != (dim, dim):
            raise ValueError("rotation must be dim x dim")
        self.bias = float(bias)
        self.space = SearchSpace.box(dim) if space is None else space
        self.name = name or base
        for arr in (self.shift, self.rotation):
            if arr is not None:
                arr.setflags(write=False)

    def __repr__(self):
        return f"BenchmarkProblem({self.name!r}, base={self.base.name!r}, dim={self.dim})"

    def transform(self, x: np.ndarray) -> np.ndarray:
        z = x - self.shift
        if self.rotation is not None:
            z = z @ self.rotation.T
        return z

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ContractViolation(f"expected a vector of length {self.dim}, got {x.shape}")
        return float(self.base.fn(self.transform(x))) + self.bias

    def batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ContractViolation(f"expected an (n, {self.dim}) array, got {X.shape}")
        return self.base.fn(self.transform(X)) + self.bias

    @property
    def optimum(self) -> np.ndarray:
        z_star = self.base.optimum(self.dim)
        if self.rotation is not None:
            z_star = self.rotation.T @ z_star
        return self.shift + z_star

    @property
    def f_min(self) -> float:
        return self.bias


def evaluate_problem(p: BenchmarkProblem, x) -> float:
    return p(x)


def error_value(p, x_best) -> float:
    """Objective value above the known global minimum."""
    return p(x_best) - p.f_min


class CompositionProblem:
    """
    Three-component composition in the CEC style (not an official instance).

    ``f(x) = sum_i w_i(x) (lam_i g_i(x) + bias_i) + f*``, with weights
    ``w_i ~ exp(-|x - o_i|^2 / (2 D sigma_i^2)) / |x - o_i|`` normalized to
    sum to one. Component 0 carries ``bias_i = 0`` so the global optimum is
    its shift, with value ``f*``.
    """

    def __init__(self, components, sigmas, lambdas, biases, *, bias: float = 0.0,
                 name: str = "composition3"):
        if not len(components) == len(sigmas) == len(lambdas) == len(biases):
            raise ValueError("component lists must have equal length")
        if biases[0] != 0:
            raise ValueError("the first component must carry zero bias")
        self.components = list(components)
        self.dim = self.components[0].dim
        self.sigmas = np.asarray(sigmas, dtype=float)
        self.lambdas = np.asarray(lambdas, dtype=float)
        self.biases = np.asarray(biases, dtype=float)
        self.bias = float(bias)
        self.space = self.components[0].space
        self.name = name

    @classmethod
    def seeded(cls, dim: int, seed: int, bases=("rastrigin", "griewank", "schwefel"),
               bias: float = 2100.0) -> "CompositionProblem":
        rng = RngStream(fnv1a_64(f"composition|{seed}|{dim}"))
        comps = []
        for b in bases:
            shift = rng.uniform(dim) * 160.0 - 80.0
            comps.append(BenchmarkProblem(b, dim, shift=shift,
                                          rotation=random_orthogonal(dim, rng), name=b))
        return cls(comps, [10.0, 20.0, 30.0], [1.0, 10.0, 1.0], [0.0, 100.0, 200.0],
                   bias=bias)

    def batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        g = np.stack([c.batch(X) - c.bias for c in self.components], axis=1)
        d2 = np.stack([np.sum((X - c.shift) ** 2, axis=1) for c in self.components], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.exp(-d2 / (2.0 * self.dim * self.sigmas ** 2)) / np.sqrt(d2)
        hit = d2 == 0.0
        w = np.where(hit.any(axis=1, keepdims=True), hit.astype(float), w)
        total = w.sum(axis=1, keepdims=True)
        w = np.where(total > 0, w / np.where(total > 0, total, 1.0), 1.0 / len(self.components))
        return np.sum(w * (self.lambdas * g + self.biases), axis=1) + self.bias

    def __call__(self, x) -> float:
        return float(self.batch(np.asarray(x, dtype=float)[None, :])[0])

    @property
    def optimum(self) -> np.ndarray:
        return self.components[0].optimum

    @property
    def f_min(self) -> float:
        return self.bias


# --- suite manifest ---------------------------------------------------------

TRANSFORMS = ("none", "shift", "rotate", "shift_rotate")


@dataclass(frozen=True)
class ManifestEntry:
    problem_id: str
    base: str
    dim: int
    suite_seed: int
    bias: float
    transform: str = "shift_rotate"

    def __post_init__(self):
        _base(self.base)
        if self.transform not in TRANSFORMS:
            raise ValueError(f"transform must be one of {TRANSFORMS}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")


def make_problem(entry: ManifestEntry) -> BenchmarkProblem:
    """Build the problem instance a manifest line describes."""
    rng = RngStream(fnv1a_64(f"{entry.suite_seed}|{entry.problem_id}|{entry.dim}"))
    shift = rng.uniform(entry.dim) * 160.0 - 80.0
    rotation = random_orthogonal(entry.dim, rng)
    return BenchmarkProblem(
        entry.base, entry.dim,
        shift=shift if "shift" in entry.transform else None,
        rotation=rotation if "rotate" in entry.transform else None,
        bias=entry.bias, name=entry.problem_id)


_HEADER = "# problem_id base dim suite_seed bias transform"


def write_manifest(entries, path) -> None:
    lines = [_HEADER]
    for e in entries:
        lines.append(f"{e.problem_id} {e.base} {e.dim} {e.suite_seed} {e.bias!r} {e.transform}")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_manifest(text: str) -> list:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (5, 6):
            raise ValueError(f"manifest line {lineno}: expected 5 or 6 fields, got {len(parts)}")
        entries.append(ManifestEntry(parts[0], parts[1], int(parts[2]), int(parts[3]),
                                     float(parts[4]), *parts[5:]))
    ids = [e.problem_id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate problem ids in manifest")
    return entries


def read_manifest(path) -> list:
    return parse_manifest(Path(path).read_text())


def suite_from_manifest(entries) -> dict:
    return {e.problem_id: make_problem(e) for e in entries}


DEFAULT_SUITE_SEED = 2017

DEFAULT_SUITE = [
    ManifestEntry(name, name, 10, DEFAULT_SUITE_SEED, bias)
    for name, bias in (
        ("zakharov", 300.0), ("rastrigin", 500.0), ("levy", 900.0),
        ("rosenbrock", 400.0), ("ackley", 700.0), ("griewank", 800.0),
    )
]

SMOKE_SUITE = [
    ManifestEntry(name, name, 10, DEFAULT_SUITE_SEED, bias)
    for name, bias in (("sphere", 100.0), ("zakharov", 300.0),
                       ("rastrigin", 500.0), ("rosenbrock", 400.0))
]
