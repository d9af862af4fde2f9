"""Sparse deconvolution and jump detection test problems."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .dictionary import Dictionary, Observation, as_support
from .errors import BadDims

M_DEF = 300


@dataclass(frozen=True)
class Scenario:
    """Benchmark setting. ``sigma`` is the Gaussian width (deconvolution only)."""

    name: str
    kind: str  # "deconv" or "jumps"
    snr_db: float
    k: int
    f: int = 1
    delta: int = 1
    sigma: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("deconv", "jumps"):
            raise BadDims(f"unknown problem kind {self.kind!r}")
        if self.kind == "deconv" and not self.sigma:
            raise BadDims("a deconvolution scenario needs sigma")
        if self.kind == "jumps" and self.delta != 1:
            raise BadDims("undersampling is only defined for deconvolution")

    @property
    def m_base(self) -> int:
        return M_DEF * self.f

    @property
    def n(self) -> int:
        if self.kind == "jumps":
            return self.m_base
        return self.m_base - 6 * self.sigma

    @property
    def m(self) -> int:
        if self.kind == "jumps":
            return self.m_base
        return self.m_base // self.delta

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snr_db"] = "inf" if math.isinf(self.snr_db) else self.snr_db
        d.update(m=self.m, n=self.n)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        keys = ("name", "kind", "snr_db", "k", "f", "delta", "sigma", "seed")
        kw = {k: d[k] for k in keys if k in d}
        kw["snr_db"] = float(kw["snr_db"])
        kw.setdefault("name", "custom")
        return cls(**kw)


_INF = math.inf
PRESETS = {
    "A": Scenario("A", "deconv", 25, 30, f=1, delta=1, sigma=3),
    "B": Scenario("B", "deconv", 10, 10, f=1, delta=1, sigma=8),
    "C": Scenario("C", "deconv", 25, 10, f=3, delta=1, sigma=24),
    "D": Scenario("D", "deconv", 25, 30, f=6, delta=1, sigma=18),
    "E": Scenario("E", "jumps", 25, 10),
    "F": Scenario("F", "jumps", 25, 30),
    "G": Scenario("G", "jumps", 10, 10),
    "H": Scenario("H", "deconv", _INF, 10, f=3, delta=2, sigma=24),
    "I": Scenario("I", "deconv", _INF, 30, f=3, delta=2, sigma=24),
    "J": Scenario("J", "deconv", _INF, 10, f=1, delta=4, sigma=8),
}


def scenario(name: str, seed: int = 0) -> Scenario:
    try:
        return PRESETS[name.upper()].with_seed(seed)
    except KeyError:
        raise BadDims(f"unknown scenario {name!r}; choose from {sorted(PRESETS)}") from None


def gaussian_filter(sigma: int) -> np.ndarray:
    """Peak-one Gaussian taps at integer offsets -3 sigma .. 3 sigma - 1."""
    t = np.arange(-3 * sigma, 3 * sigma)
    return np.exp(-(t**2) / (2.0 * sigma**2))


def gaussian_deconv_dictionary(m_base: int, sigma: int, delta: int = 1) -> Dictionary:
    """Toeplitz convolution matrix with every shifted response inside the window,
    keeping one row out of ``delta``."""
    width = 6 * sigma
    if sigma < 1 or m_base <= width:
        raise BadDims(f"need m_base > 6 sigma, got m_base={m_base}, sigma={sigma}")
    if delta < 1 or m_base % delta:
        raise BadDims(f"delta={delta} must divide m_base={m_base}")
    h = gaussian_filter(sigma)
    n = m_base - width
    A = np.zeros((m_base, n))
    for j in range(n):
        A[j : j + width, j] = h
    return Dictionary(A[::delta])


def jump_dictionary(n: int) -> Dictionary:
    """Lower-triangular ones: atom j is a unit step starting at sample j."""
    if n < 1:
        raise BadDims("n must be positive")
    return Dictionary(np.tril(np.ones((n, n))))


def scenario_dictionary(sc: Scenario) -> Dictionary:
    if sc.kind == "jumps":
        return jump_dictionary(sc.n)
    return gaussian_deconv_dictionary(sc.m_base, sc.sigma, sc.delta)


@dataclass
class Instance:
    dictionary: Dictionary
    x_star: np.ndarray
    support_star: tuple
    y: Observation
    sigma_n_sq: float
    scenario: Scenario | None = None
    trial: int | None = None


def noise_variance(signal: np.ndarray, snr_db: float) -> float:
    """Per-sample variance giving SNR = 10 log10(||Ax||^2 / (m sigma^2))."""
    if math.isinf(snr_db):
        return 0.0
    return float(signal @ signal) / (signal.size * 10.0 ** (snr_db / 10.0))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def draw_instance(sc: Scenario, trial_seed: int, dictionary: Dictionary | None = None) -> Instance:
    """Random k-sparse x* with uniform locations and standard Gaussian amplitudes,
    plus white Gaussian noise at the scenario SNR.

    ``dictionary`` may be passed to reuse an already built matrix.
    """
    A = dictionary if dictionary is not None else scenario_dictionary(sc)
    if sc.k > A.n:
        raise BadDims(f"k={sc.k} exceeds n={A.n}")
    rng = trial_rng(sc.seed, trial_seed)
    support = as_support(rng.choice(A.n, size=sc.k, replace=False))
    x = np.zeros(A.n)
    x[list(support)] = rng.standard_normal(sc.k)
    clean = A.columns @ x
    var = noise_variance(clean, sc.snr_db)
    noise = np.sqrt(var) * rng.standard_normal(A.m) if var > 0 else np.zeros(A.m)
    return Instance(A, x, support, Observation(clean + noise), var, sc, trial_seed)


SMALL_KINDS = ("gaussian", "jumps", "deconv")


def small_dictionary(kind: str, m: int, n: int, rng: np.random.Generator) -> Dictionary:
    """Oracle-sized dictionaries. ``jumps`` is n x n and ``deconv`` uses sigma=1,
    so m is forced to n and n + 6 respectively."""
    if kind == "gaussian":
        return Dictionary(rng.standard_normal((m, n)))
    if kind == "jumps":
        return jump_dictionary(n)
    if kind == "deconv":
        return gaussian_deconv_dictionary(n + 6, 1)
    raise BadDims(f"unknown dictionary kind {kind!r}; choose from {SMALL_KINDS}")


def small_instance(kind: str, m: int, n: int, seed: int, trial: int, k: int = 3, snr_db: float = 10.0) -> Instance:
    """k-sparse noisy instance on a small dictionary, reproducible from (seed, trial)."""
    rng = trial_rng(seed, trial)
    A = small_dictionary(kind, m, n, rng)
    k = min(k, A.n)
    support = as_support(rng.choice(A.n, size=k, replace=False))
    x = np.zeros(A.n)
    x[list(support)] = rng.standard_normal(k)
    clean = A.columns @ x
    var = noise_variance(clean, snr_db)
    y = clean + np.sqrt(var) * rng.standard_normal(A.m)
    return Instance(A, x, support, Observation(y), var, None, trial)
