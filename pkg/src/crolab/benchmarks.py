"""The classic 23-function continuous benchmark suite.

Pure scalar evaluators over box-bounded domains, split into three groups:
f1-f7 unimodal, f8-f13 high-dimensional multimodal, f14-f23 low-dimensional
multimodal.  Evaluation order inside each function is fixed (sequential
accumulation) so results are bit-identical to the compiled kernel's copies.

`known_min`/`argmin` store the best-known optima, refined to full double
precision from the published locations; the test suite re-derives them
against the published roundings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .rng import RandomSource

_TWO_PI = 2.0 * math.pi

CATEGORY_I = "I"
CATEGORY_II = "II"
CATEGORY_III = "III"

# diagnostic tally of out-of-bounds evaluations per function id; the engine
# keeps every structure inside bounds, so this only counts external misuse
_OUT_OF_BOUNDS: dict[str, int] = {}


def out_of_bounds_evaluations(fid: Optional[str] = None) -> int:
    if fid is None:
        return sum(_OUT_OF_BOUNDS.values())
    return _OUT_OF_BOUNDS.get(fid, 0)


def reset_out_of_bounds_tally():
    _OUT_OF_BOUNDS.clear()


@dataclass(frozen=True)
class BenchmarkFunction:
    id: str
    name: str
    dim: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    category: str
    known_min: float
    argmin: Optional[tuple[float, ...]]
    noisy: bool = False
    _fn: Callable[[Sequence[float]], float] = field(repr=False, default=None)

    @property
    def fe_limit(self) -> int:
        return FE_LIMITS[self.id]

    def evaluate(self, x: Sequence[float], rng: Optional[RandomSource] = None) -> float:
        """Objective value at x; the noisy quartic draws its additive term
        from `rng` (replayable) and is noise-free when rng is None.

        Out-of-bounds points are still evaluated, but tallied in the
        module's diagnostic counter."""
        if len(x) != self.dim:
            raise ValueError(f"{self.id} expects dimension {self.dim}, got {len(x)}")
        for v, lo, hi in zip(x, self.lower, self.upper):
            if v < lo or v > hi:
                _OUT_OF_BOUNDS[self.id] = _OUT_OF_BOUNDS.get(self.id, 0) + 1
                break
        value = self._fn(x)
        if self.noisy and rng is not None:
            value += rng.uniform()
        return value


def _sphere(x):
    s = 0.0
    for v in x:
        s += v * v
    return s


def _schwefel_2_22(x):
    s = 0.0
    p = 1.0
    for v in x:
        a = abs(v)
        s += a
        p *= a
    return s + p


def _schwefel_1_2(x):
    s = 0.0
    run = 0.0
    for v in x:
        run += v
        s += run * run
    return s


def _schwefel_2_21(x):
    m = 0.0
    for v in x:
        a = abs(v)
        if a > m:
            m = a
    return m


def _rosenbrock(x):
    s = 0.0
    for d in range(len(x) - 1):
        t1 = x[d + 1] - x[d] * x[d]
        t2 = x[d] - 1.0
        s += 100.0 * (t1 * t1) + t2 * t2
    return s


def _step(x):
    s = 0.0
    for v in x:
        t = math.floor(v + 0.5)
        s += t * t
    return s


def _quartic(x):
    # noise is added by BenchmarkFunction.evaluate so the core stays pure
    s = 0.0
    for d, v in enumerate(x):
        t2 = v * v
        s += (d + 1) * (t2 * t2)
    return s


def _schwefel_2_26(x):
    s = 0.0
    for v in x:
        s -= v * math.sin(math.sqrt(abs(v)))
    return s


def _rastrigin(x):
    s = 0.0
    for v in x:
        s += v * v - 10.0 * math.cos(_TWO_PI * v) + 10.0
    return s


def _ackley(x):
    n = len(x)
    s1 = 0.0
    s2 = 0.0
    for v in x:
        s1 += v * v
        s2 += math.cos(_TWO_PI * v)
    return -20.0 * math.exp(-0.2 * math.sqrt(s1 / n)) - math.exp(s2 / n) + 20.0 + math.e


def _griewank(x):
    s = 0.0
    p = 1.0
    for d, v in enumerate(x):
        s += v * v
        p *= math.cos(v / math.sqrt(d + 1.0))
    return s / 4000.0 - p + 1.0


def _penalty(v, a):
    # boundary penalty term: quartic wall of height 100 outside [-a, a]
    if v > a:
        t = v - a
        return 100.0 * (t * t) * (t * t)
    if v < -a:
        t = -v - a
        return 100.0 * (t * t) * (t * t)
    return 0.0


def _penalized_1(x):
    n = len(x)
    y0 = 1.0 + (x[0] + 1.0) / 4.0
    t = math.sin(math.pi * y0)
    s = 10.0 * (t * t)
    for d in range(n - 1):
        yd = 1.0 + (x[d] + 1.0) / 4.0
        yn = 1.0 + (x[d + 1] + 1.0) / 4.0
        t = math.sin(math.pi * yn)
        s += (yd - 1.0) * (yd - 1.0) * (1.0 + 10.0 * (t * t))
    ylast = 1.0 + (x[n - 1] + 1.0) / 4.0
    s += (ylast - 1.0) * (ylast - 1.0)
    total = (math.pi / n) * s
    for v in x:
        total += _penalty(v, 10.0)
    return total


def _penalized_2(x):
    n = len(x)
    t = math.sin(3.0 * math.pi * x[0])
    s = t * t
    for d in range(n - 1):
        td = x[d] - 1.0
        t = math.sin(3.0 * math.pi * x[d + 1])
        s += td * td * (1.0 + t * t)
    tn = x[n - 1] - 1.0
    t = math.sin(_TWO_PI * x[n - 1])
    s += tn * tn * (1.0 + t * t)
    total = 0.1 * s
    for v in x:
        total += _penalty(v, 5.0)
    return total


_FOX = (-32.0, -16.0, 0.0, 16.0, 32.0)


def _foxholes(x):
    inner = 1.0 / 500.0
    for j in range(25):
        d1 = x[0] - _FOX[j % 5]
        d2 = x[1] - _FOX[j // 5]
        t1 = d1 * d1
        t2 = d2 * d2
        inner += 1.0 / ((j + 1.0) + t1 * t1 * t1 + t2 * t2 * t2)
    return 1.0 / inner


_KOW_A = (0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
          0.0456, 0.0342, 0.0323, 0.0235, 0.0246)
_KOW_BINV = (0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0)


def _kowalik(x):
    s = 0.0
    for i in range(11):
        b = 1.0 / _KOW_BINV[i]
        num = x[0] * (b * b + b * x[1])
        den = b * b + b * x[2] + x[3]
        t = _KOW_A[i] - num / den
        s += t * t
    return s


def _camel(x):
    x1 = x[0]
    x2 = x[1]
    x1_2 = x1 * x1
    x1_4 = x1_2 * x1_2
    x2_2 = x2 * x2
    return (4.0 * x1_2 - 2.1 * x1_4 + (x1_4 * x1_2) / 3.0 + x1 * x2
            - 4.0 * x2_2 + 4.0 * (x2_2 * x2_2))


def _branin(x):
    x1 = x[0]
    x2 = x[1]
    t = x2 - 5.1 / (4.0 * math.pi * math.pi) * (x1 * x1) + 5.0 / math.pi * x1 - 6.0
    return t * t + 10.0 * (1.0 - 1.0 / (8.0 * math.pi)) * math.cos(x1) + 10.0


def _goldstein_price(x):
    x1 = x[0]
    x2 = x[1]
    t1 = x1 + x2 + 1.0
    q1 = (19.0 - 14.0 * x1 + 3.0 * (x1 * x1) - 14.0 * x2
          + 6.0 * (x1 * x2) + 3.0 * (x2 * x2))
    t2 = 2.0 * x1 - 3.0 * x2
    q2 = (18.0 - 32.0 * x1 + 12.0 * (x1 * x1) + 48.0 * x2
          - 36.0 * (x1 * x2) + 27.0 * (x2 * x2))
    return (1.0 + (t1 * t1) * q1) * (30.0 + (t2 * t2) * q2)


_H3_A = ((3.0, 10.0, 30.0), (0.1, 10.0, 35.0), (3.0, 10.0, 30.0), (0.1, 10.0, 35.0))
_H3_C = (1.0, 1.2, 3.0, 3.2)
_H3_P = ((0.3689, 0.1170, 0.2673),
         (0.4699, 0.4387, 0.7470),
         (0.1091, 0.8732, 0.5547),
         (0.03815, 0.5743, 0.8828))


def _hartman_3(x):
    s = 0.0
    for i in range(4):
        inner = 0.0
        for j in range(3):
            d = x[j] - _H3_P[i][j]
            inner += _H3_A[i][j] * (d * d)
        s += _H3_C[i] * math.exp(-inner)
    return -s


_H6_A = ((10.0, 3.0, 17.0, 3.5, 1.7, 8.0),
         (0.05, 10.0, 17.0, 0.1, 8.0, 14.0),
         (3.0, 3.5, 1.7, 10.0, 17.0, 8.0),
         (17.0, 8.0, 0.05, 10.0, 0.1, 14.0))
_H6_C = (1.0, 1.2, 3.0, 3.2)
_H6_P = ((0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886),
         (0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991),
         (0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650),
         (0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381))


def _hartman_6(x):
    s = 0.0
    for i in range(4):
        inner = 0.0
        for j in range(6):
            d = x[j] - _H6_P[i][j]
            inner += _H6_A[i][j] * (d * d)
        s += _H6_C[i] * math.exp(-inner)
    return -s


_SHEK_A = ((4.0, 4.0, 4.0, 4.0), (1.0, 1.0, 1.0, 1.0), (8.0, 8.0, 8.0, 8.0),
           (6.0, 6.0, 6.0, 6.0), (3.0, 7.0, 3.0, 7.0), (2.0, 9.0, 2.0, 9.0),
           (5.0, 5.0, 3.0, 3.0), (8.0, 1.0, 8.0, 1.0), (6.0, 2.0, 6.0, 2.0),
           (7.0, 3.6, 7.0, 3.6))
_SHEK_C = (0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5)


def _shekel(x, m):
    s = 0.0
    for i in range(m):
        dsum = 0.0
        for j in range(4):
            d = x[j] - _SHEK_A[i][j]
            dsum += d * d
        s += 1.0 / (dsum + _SHEK_C[i])
    return -s


def _shekel_5(x):
    return _shekel(x, 5)


def _shekel_7(x):
    return _shekel(x, 7)


def _shekel_10(x):
    return _shekel(x, 10)


FE_LIMITS = {
    "f1": 150_000, "f2": 150_000, "f3": 250_000, "f4": 150_000,
    "f5": 150_000, "f6": 150_000, "f7": 150_000, "f8": 150_000,
    "f9": 250_000, "f10": 150_000, "f11": 150_000, "f12": 150_000,
    "f13": 150_000, "f14": 7_500, "f15": 250_000, "f16": 1_250,
    "f17": 5_000, "f18": 10_000, "f19": 4_000, "f20": 7_500,
    "f21": 10_000, "f22": 10_000, "f23": 10_000,
}

# integer codes shared with the compiled kernel (f1 -> 1, ..., f23 -> 23)
FUNCTION_CODES = {f"f{i}": i for i in range(1, 24)}


def _box(dim, lo, hi):
    return (lo,) * dim, (hi,) * dim


def _make_suite() -> list[BenchmarkFunction]:
    d30_lo100, d30_hi100 = _box(30, -100.0, 100.0)
    fns = [
        BenchmarkFunction("f1", "sphere", 30, d30_lo100, d30_hi100, CATEGORY_I,
                          0.0, (0.0,) * 30, _fn=_sphere),
        BenchmarkFunction("f2", "schwefel_2_22", 30, *_box(30, -10.0, 10.0), CATEGORY_I,
                          0.0, (0.0,) * 30, _fn=_schwefel_2_22),
        BenchmarkFunction("f3", "schwefel_1_2", 30, d30_lo100, d30_hi100, CATEGORY_I,
                          0.0, (0.0,) * 30, _fn=_schwefel_1_2),
        BenchmarkFunction("f4", "schwefel_2_21", 30, d30_lo100, d30_hi100, CATEGORY_I,
                          0.0, (0.0,) * 30, _fn=_schwefel_2_21),
        BenchmarkFunction("f5", "rosenbrock", 30, *_box(30, -30.0, 30.0), CATEGORY_I,
                          0.0, (1.0,) * 30, _fn=_rosenbrock),
        BenchmarkFunction("f6", "step", 30, d30_lo100, d30_hi100, CATEGORY_I,
                          0.0, (0.0,) * 30, _fn=_step),
        BenchmarkFunction("f7", "quartic_noise", 30, *_box(30, -1.28, 1.28), CATEGORY_I,
                          0.0, (0.0,) * 30, noisy=True, _fn=_quartic),
        BenchmarkFunction("f8", "schwefel_2_26", 30, *_box(30, -500.0, 500.0), CATEGORY_II,
                          -12569.48661816488, (420.9687,) * 30, _fn=_schwefel_2_26),
        BenchmarkFunction("f9", "rastrigin", 30, *_box(30, -5.12, 5.12), CATEGORY_II,
                          0.0, (0.0,) * 30, _fn=_rastrigin),
        BenchmarkFunction("f10", "ackley", 30, *_box(30, -32.0, 32.0), CATEGORY_II,
                          0.0, (0.0,) * 30, _fn=_ackley),
        BenchmarkFunction("f11", "griewank", 30, *_box(30, -600.0, 600.0), CATEGORY_II,
                          0.0, (0.0,) * 30, _fn=_griewank),
        BenchmarkFunction("f12", "penalized_1", 30, *_box(30, -50.0, 50.0), CATEGORY_II,
                          0.0, (-1.0,) * 30, _fn=_penalized_1),
        BenchmarkFunction("f13", "penalized_2", 30, *_box(30, -50.0, 50.0), CATEGORY_II,
                          0.0, (1.0,) * 30, _fn=_penalized_2),
        BenchmarkFunction("f14", "foxholes", 2, *_box(2, -65.536, 65.536), CATEGORY_III,
                          0.9980038377944498, (-31.978333377976, -31.978334007871),
                          _fn=_foxholes),
        BenchmarkFunction("f15", "kowalik", 4, *_box(4, -5.0, 5.0), CATEGORY_III,
                          0.0003074859878056054,
                          (0.192833453081, 0.190836239991, 0.123117299277, 0.135765990269),
                          _fn=_kowalik),
        BenchmarkFunction("f16", "camel_six_hump", 2, *_box(2, -5.0, 5.0), CATEGORY_III,
                          -1.0316284534898774, (0.089842013274, -0.712656400525),
                          _fn=_camel),
        BenchmarkFunction("f17", "branin", 2, (-5.0, 0.0), (10.0, 15.0), CATEGORY_III,
                          0.39788735772973816, (math.pi, 2.275), _fn=_branin),
        BenchmarkFunction("f18", "goldstein_price", 2, *_box(2, -2.0, 2.0), CATEGORY_III,
                          3.0, (0.0, -1.0), _fn=_goldstein_price),
        BenchmarkFunction("f19", "hartman_3", 3, *_box(3, 0.0, 1.0), CATEGORY_III,
                          -3.862782147820756, (0.114614342031, 0.555648850791, 0.852546953846),
                          _fn=_hartman_3),
        BenchmarkFunction("f20", "hartman_6", 6, *_box(6, 0.0, 1.0), CATEGORY_III,
                          -3.322368011415515,
                          (0.201689510377, 0.150010691466, 0.476873973372,
                           0.275332428854, 0.311651616563, 0.657300530846),
                          _fn=_hartman_6),
        BenchmarkFunction("f21", "shekel_5", 4, *_box(4, 0.0, 10.0), CATEGORY_III,
                          -10.153199679058229,
                          (4.000037152377, 4.000133278658, 4.000037151058, 4.00013327709),
                          _fn=_shekel_5),
        BenchmarkFunction("f22", "shekel_7", 4, *_box(4, 0.0, 10.0), CATEGORY_III,
                          -10.402940566818662,
                          (4.000572914277, 4.000689366041, 3.999489710794, 3.999606160007),
                          _fn=_shekel_7),
        BenchmarkFunction("f23", "shekel_10", 4, *_box(4, 0.0, 10.0), CATEGORY_III,
                          -10.536409816692046,
                          (4.000746533202, 4.000592934539, 3.99966339722, 3.999509801285),
                          _fn=_shekel_10),
    ]
    return fns


_SUITE = _make_suite()
_BY_ID = {fn.id: fn for fn in _SUITE}

FUNCTION_IDS = tuple(fn.id for fn in _SUITE)


def suite() -> list[BenchmarkFunction]:
    """All 23 descriptors in f1..f23 order."""
    return list(_SUITE)


def get_function(fid: str) -> BenchmarkFunction:
    try:
        return _BY_ID[fid]
    except KeyError:
        raise KeyError(f"unknown benchmark function {fid!r}; expected f1..f23") from None


def evaluate(fid: str, x: Sequence[float], rng: Optional[RandomSource] = None) -> float:
    return get_function(fid).evaluate(x, rng)
