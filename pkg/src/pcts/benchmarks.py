"""Multi-fidelity synthetic objectives with known optima.

Each benchmark is a pure, deterministic function of (point, fidelity z); all
noise and delay live in the simulator.  Fidelity z in [0, 1] trades accuracy
for cost: z = 1 is the exact function, lower z is biased but cheaper under
the benchmark's cost curve lambda(z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .partition import Box

Point = Sequence[float]


@dataclass(frozen=True)
class Benchmark:
    """A named objective: domain, evaluator, cost curve, and known optimum."""

    name: str
    dim: int
    domain: Box
    evaluate: Callable[[Point, float], float]
    cost: Callable[[float], float]
    default_sigma2: float
    f_star: float
    maximizer: Optional[tuple[float, ...]]
    default_b: float  # loose range proxy for the empirical-Bernstein policy


def _check_domain(name: str, x: Point, box: Box) -> None:
    if not box.contains(x):
        raise ValueError(f"{name}: point {tuple(x)} outside domain")


# ---------------------------------------------------------------------------
# Hartmann family

_HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])

_HARTMANN3_A = np.array(
    [[3.0, 10.0, 30.0],
     [0.1, 10.0, 35.0],
     [3.0, 10.0, 30.0],
     [0.1, 10.0, 35.0]]
)
_HARTMANN3_P = 1e-4 * np.array(
    [[3689.0, 1170.0, 2673.0],
     [4699.0, 4387.0, 7470.0],
     [1091.0, 8732.0, 5547.0],
     [381.0, 5743.0, 8828.0]]
)

_HARTMANN6_A = np.array(
    [[10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
     [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
     [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
     [17.0, 8.0, 0.05, 10.0, 0.1, 14.0]]
)
_HARTMANN6_P = 1e-4 * np.array(
    [[1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
     [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
     [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
     [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0]]
)

_H3_BOX = Box((0.0,) * 3, (1.0,) * 3)
_H6_BOX = Box((0.0,) * 6, (1.0,) * 6)


def _hartmann(x: Point, z: float, A: np.ndarray, P: np.ndarray) -> float:
    xv = np.asarray(x, dtype=float)
    coef = _HARTMANN_ALPHA - 0.1 * (1.0 - z)
    return float(np.dot(coef, np.exp(-np.sum(A * (xv - P) ** 2, axis=1))))


def hartmann3(x: Point, z: float) -> float:
    """3-d Hartmann; fidelity shrinks every mixture weight by 0.1 * (1 - z)."""
    _check_domain("hartmann3", x, _H3_BOX)
    return _hartmann(x, z, _HARTMANN3_A, _HARTMANN3_P)


def hartmann6(x: Point, z: float) -> float:
    """6-d Hartmann with the same fidelity structure as hartmann3."""
    _check_domain("hartmann6", x, _H6_BOX)
    return _hartmann(x, z, _HARTMANN6_A, _HARTMANN6_P)


# ---------------------------------------------------------------------------
# Currin exponential

_CURRIN_BOX = Box((0.0, 0.0), (1.0, 1.0))


def currin_exp(x: Point, z: float) -> float:
    """2-d Currin exponential; the x2 = 0 boundary uses the continuous limit."""
    _check_domain("currin", x, _CURRIN_BOX)
    x1, x2 = float(x[0]), float(x[1])
    damp = 0.0 if x2 <= 0.0 else math.exp(-1.0 / (2.0 * x2))
    lead = 1.0 - 0.1 * (1.0 - z) * damp
    num = 2300.0 * x1**3 + 1900.0 * x1**2 + 2092.0 * x1 + 60.0
    den = 100.0 * x1**3 + 500.0 * x1**2 + 4.0 * x1 + 20.0
    return lead * num / den


# ---------------------------------------------------------------------------
# Borehole

_BOREHOLE_BOX = Box(
    (0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0, 9855.0),
    (0.15, 50000.0, 115600.0, 1110.0, 116.0, 820.0, 1680.0, 12045.0),
)


def borehole(x: Point, z: float) -> float:
    """8-d borehole flow; fidelity blends the exact and a cheap approximation."""
    _check_domain("borehole", x, _BOREHOLE_BOX)
    rw, r, tu, hu, tl, hl, length, kw = (float(v) for v in x)
    if r <= rw:
        raise ValueError("borehole: need r > r_w for a positive log ratio")
    lg = math.log(r / rw)
    inner = 2.0 * length * tu / (lg * rw * rw * kw) + tu / tl
    exact = 2.0 * math.pi * tu * (hu - hl) / (lg * (1.0 + inner))
    cheap = 5.0 * tu * (hu - hl) / (lg * (1.5 + inner))
    return z * exact + (1.0 - z) * cheap


# ---------------------------------------------------------------------------
# Branin (negated: the suite maximizes everywhere)

_BRANIN_BOX = Box((-5.0, 0.0), (10.0, 15.0))


def branin(x: Point, z: float) -> float:
    """Negated 2-d Branin, so its best value is -0.3979 under maximization."""
    _check_domain("branin", x, _BRANIN_BOX)
    x1, x2 = float(x[0]), float(x[1])
    b = 5.1 / (4.0 * math.pi**2) - 0.01 * (1.0 - z)
    c = 5.0 / math.pi - 0.1 * (1.0 - z)
    t = 1.0 / (8.0 * math.pi) + 0.05 * (1.0 - z)
    value = (x2 - b * x1**2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * math.cos(x1) + 10.0
    return -value


# ---------------------------------------------------------------------------
# Schwefel (single fidelity)

_SCHWEFEL_DIM = 20
_SCHWEFEL_BOX = Box((0.0,) * _SCHWEFEL_DIM, (500.0,) * _SCHWEFEL_DIM)


def schwefel(x: Point, z: float = 1.0) -> float:
    """20-d Schwefel; fidelity has no effect (single-fidelity, unit cost)."""
    _check_domain("schwefel", x, _SCHWEFEL_BOX)
    xv = np.asarray(x, dtype=float)
    return float(-418.9829 * _SCHWEFEL_DIM + np.sum(xv * np.sin(np.sqrt(np.abs(xv)))))


# ---------------------------------------------------------------------------
# registry

# optima located by an offline coarse-grid + local-refinement search and
# frozen here; the catalogued table values agree within the test tolerances
_REGISTRY: dict[str, Benchmark] = {}


def register(benchmark: Benchmark) -> Benchmark:
    _REGISTRY[benchmark.name] = benchmark
    return benchmark


def get_benchmark(name: str) -> Benchmark:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; known: {sorted(_REGISTRY)}") from None


def benchmark_names() -> list[str]:
    return sorted(_REGISTRY)


register(
    Benchmark(
        name="hartmann3",
        dim=3,
        domain=_H3_BOX,
        evaluate=hartmann3,
        cost=lambda z: 0.05 + 0.95 * z**3,
        default_sigma2=0.01,
        f_star=3.862779787332663,
        maximizer=(0.11458886752332709, 0.5556488945904771, 0.8525469850399127),
        default_b=5.0,
    )
)

register(
    Benchmark(
        name="hartmann6",
        dim=6,
        domain=_H6_BOX,
        evaluate=hartmann6,
        cost=lambda z: 0.05 + 0.95 * z**3,
        default_sigma2=0.05,
        f_star=3.322368011415515,
        maximizer=(
            0.20168951138537505,
            0.1500106928003017,
            0.47687397118891944,
            0.2753324302883223,
            0.3116516167715188,
            0.6573005337429142,
        ),
        default_b=5.0,
    )
)

register(
    Benchmark(
        name="currin",
        dim=2,
        domain=_CURRIN_BOX,
        evaluate=currin_exp,
        cost=lambda z: 0.1 + z**2,
        default_sigma2=0.05,
        f_star=13.79872204472844,
        maximizer=(0.2166666668966813, 0.47519687817653977),
        default_b=15.0,
    )
)

register(
    Benchmark(
        name="borehole",
        dim=8,
        domain=_BOREHOLE_BOX,
        evaluate=borehole,
        cost=lambda z: 0.1 + z**1.5,
        default_sigma2=0.01,
        f_star=309.5755876604079,
        maximizer=(0.15, 100.0, 115600.0, 1110.0, 116.0, 700.0, 1120.0, 12045.0),
        default_b=350.0,
    )
)

register(
    Benchmark(
        name="branin",
        dim=2,
        domain=_BRANIN_BOX,
        evaluate=branin,
        cost=lambda z: 0.05 + z**3,
        default_sigma2=0.05,
        f_star=-0.39788735772973816,
        maximizer=(9.424777954308189, 2.4750000119175057),
        default_b=310.0,
    )
)

register(
    Benchmark(
        name="schwefel",
        dim=_SCHWEFEL_DIM,
        domain=_SCHWEFEL_BOX,
        evaluate=schwefel,
        cost=lambda z: 1.0,
        default_sigma2=0.1,
        f_star=-0.00025455132345086895,
        maximizer=(420.9687463930691,) * _SCHWEFEL_DIM,
        default_b=8400.0,
    )
)
