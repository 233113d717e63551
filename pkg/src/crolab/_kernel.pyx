# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot path: RNG, perturbation sampling, objective evaluation and
the full reaction loop.

Every expression here mirrors the pure-Python backend exactly (same
generator, same draw order, same operation order), so both backends produce
bit-identical trajectories for a given seed.  Constant tables are imported
from the Python modules at init so there is a single source of truth.
"""

from libc.math cimport (M_E, M_PI, cos, exp, fabs, floor, log, sin, sqrt,
                        tan)
from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy, memmove

from . import benchmarks as _py_bench

cdef double TWO_PI = 2.0 * M_PI
cdef double U53 = 1.0 / 9007199254740992.0
cdef double TINY_UNIFORM = 1.0 / 9007199254740992.0

DEF GAUSSIAN = 0
DEF CAUCHY = 1
DEF EXPONENTIAL = 2
DEF RAYLEIGH = 3


# ---------------------------------------------------------------------------
# xoshiro256** seeded with splitmix64 (identical to crolab.rng)

cdef struct Rng:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _splitmix_next(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline void _rng_seed(Rng* rng, uint64_t seed) noexcept nogil:
    cdef uint64_t state = seed
    rng.s0 = _splitmix_next(&state)
    rng.s1 = _splitmix_next(&state)
    rng.s2 = _splitmix_next(&state)
    rng.s3 = _splitmix_next(&state)
    if rng.s0 == 0 and rng.s1 == 0 and rng.s2 == 0 and rng.s3 == 0:
        rng.s0 = <uint64_t>0x9E3779B97F4A7C15


cdef inline uint64_t _rng_next(Rng* rng) noexcept nogil:
    cdef uint64_t result = _rotl(rng.s1 * <uint64_t>5, 7) * <uint64_t>9
    cdef uint64_t t = rng.s1 << 17
    rng.s2 ^= rng.s0
    rng.s3 ^= rng.s1
    rng.s1 ^= rng.s2
    rng.s0 ^= rng.s3
    rng.s2 ^= t
    rng.s3 = _rotl(rng.s3, 45)
    return result


cdef inline double _uniform(Rng* rng) noexcept nogil:
    return <double>(_rng_next(rng) >> 11) * U53


cdef inline long _index_below(Rng* rng, long n) noexcept nogil:
    cdef long i = <long>(_uniform(rng) * n)
    if i >= n:
        i = n - 1
    return i


# ---------------------------------------------------------------------------
# perturbation sampling (scale mapping and draw order match distributions.py)

cdef inline double _sample_eps(Rng* rng, int kind, double scale) noexcept nogil:
    cdef double u1, u2, mag, y
    if kind == GAUSSIAN:
        u1 = _uniform(rng)
        u2 = _uniform(rng)
        return 0.0 + scale * sqrt(-2.0 * log(1.0 - u1)) * cos(TWO_PI * u2)
    if kind == CAUCHY:
        u1 = _uniform(rng)
        if u1 == 0.0:
            u1 = TINY_UNIFORM
        return 0.0 + scale * tan(M_PI * (u1 - 0.5))
    if kind == EXPONENTIAL:
        u1 = _uniform(rng)
        u2 = _uniform(rng)
        mag = -log(1.0 - u1) * scale
        return mag if u2 < 0.5 else -mag
    u1 = _uniform(rng)
    u2 = _uniform(rng)
    y = scale * sqrt(-2.0 * log(1.0 - u1)) - scale
    return y if u2 < 0.5 else -y


# ---------------------------------------------------------------------------
# objective evaluators (constants copied from benchmarks.py at module init)

cdef double _FOX[5]
cdef double _KOW_A[11]
cdef double _KOW_B[11]
cdef double _H3_A[4][3]
cdef double _H3_P[4][3]
cdef double _H6_A[4][6]
cdef double _H6_P[4][6]
cdef double _HART_C[4]
cdef double _SHEK_A[10][4]
cdef double _SHEK_C[10]


def _init_tables():
    cdef int i, j
    for i in range(5):
        _FOX[i] = _py_bench._FOX[i]
    for i in range(11):
        _KOW_A[i] = _py_bench._KOW_A[i]
        _KOW_B[i] = 1.0 / _py_bench._KOW_BINV[i]
    for i in range(4):
        _HART_C[i] = _py_bench._H3_C[i]
        for j in range(3):
            _H3_A[i][j] = _py_bench._H3_A[i][j]
            _H3_P[i][j] = _py_bench._H3_P[i][j]
        for j in range(6):
            _H6_A[i][j] = _py_bench._H6_A[i][j]
            _H6_P[i][j] = _py_bench._H6_P[i][j]
    for i in range(10):
        _SHEK_C[i] = _py_bench._SHEK_C[i]
        for j in range(4):
            _SHEK_A[i][j] = _py_bench._SHEK_A[i][j]


_init_tables()


cdef inline double _penalty(double v, double a) noexcept nogil:
    cdef double t
    if v > a:
        t = v - a
        return 100.0 * (t * t) * (t * t)
    if v < -a:
        t = -v - a
        return 100.0 * (t * t) * (t * t)
    return 0.0


cdef inline double _shekel_m(double* x, int m) noexcept nogil:
    cdef double s = 0.0, dsum, d
    cdef int i, j
    for i in range(m):
        dsum = 0.0
        for j in range(4):
            d = x[j] - _SHEK_A[i][j]
            dsum += d * d
        s += 1.0 / (dsum + _SHEK_C[i])
    return -s


cdef double _eval_raw(int code, double* x, int dim) noexcept nogil:
    cdef double s, p, run, m, a, t, t1, t2, v
    cdef double s1, s2, y0, yd, yn, ylast, total, inner
    cdef double d1, d2, b, num, den, x1, x2, x1_2, x1_4, x2_2, q1, q2, d
    cdef int i, j

    if code == 1:  # sphere
        s = 0.0
        for i in range(dim):
            s += x[i] * x[i]
        return s
    if code == 2:  # schwefel 2.22
        s = 0.0
        p = 1.0
        for i in range(dim):
            a = fabs(x[i])
            s += a
            p *= a
        return s + p
    if code == 3:  # schwefel 1.2
        s = 0.0
        run = 0.0
        for i in range(dim):
            run += x[i]
            s += run * run
        return s
    if code == 4:  # schwefel 2.21
        m = 0.0
        for i in range(dim):
            a = fabs(x[i])
            if a > m:
                m = a
        return m
    if code == 5:  # rosenbrock
        s = 0.0
        for i in range(dim - 1):
            t1 = x[i + 1] - x[i] * x[i]
            t2 = x[i] - 1.0
            s += 100.0 * (t1 * t1) + t2 * t2
        return s
    if code == 6:  # step
        s = 0.0
        for i in range(dim):
            t = floor(x[i] + 0.5)
            s += t * t
        return s
    if code == 7:  # quartic (noise added by caller)
        s = 0.0
        for i in range(dim):
            t2 = x[i] * x[i]
            s += (i + 1) * (t2 * t2)
        return s
    if code == 8:  # schwefel 2.26
        s = 0.0
        for i in range(dim):
            s -= x[i] * sin(sqrt(fabs(x[i])))
        return s
    if code == 9:  # rastrigin
        s = 0.0
        for i in range(dim):
            s += x[i] * x[i] - 10.0 * cos(TWO_PI * x[i]) + 10.0
        return s
    if code == 10:  # ackley
        s1 = 0.0
        s2 = 0.0
        for i in range(dim):
            s1 += x[i] * x[i]
            s2 += cos(TWO_PI * x[i])
        return -20.0 * exp(-0.2 * sqrt(s1 / dim)) - exp(s2 / dim) + 20.0 + M_E
    if code == 11:  # griewank
        s = 0.0
        p = 1.0
        for i in range(dim):
            s += x[i] * x[i]
            p *= cos(x[i] / sqrt(i + 1.0))
        return s / 4000.0 - p + 1.0
    if code == 12:  # penalized 1
        y0 = 1.0 + (x[0] + 1.0) / 4.0
        t = sin(M_PI * y0)
        s = 10.0 * (t * t)
        for i in range(dim - 1):
            yd = 1.0 + (x[i] + 1.0) / 4.0
            yn = 1.0 + (x[i + 1] + 1.0) / 4.0
            t = sin(M_PI * yn)
            s += (yd - 1.0) * (yd - 1.0) * (1.0 + 10.0 * (t * t))
        ylast = 1.0 + (x[dim - 1] + 1.0) / 4.0
        s += (ylast - 1.0) * (ylast - 1.0)
        total = (M_PI / dim) * s
        for i in range(dim):
            total += _penalty(x[i], 10.0)
        return total
    if code == 13:  # penalized 2
        t = sin(3.0 * M_PI * x[0])
        s = t * t
        for i in range(dim - 1):
            t1 = x[i] - 1.0
            t = sin(3.0 * M_PI * x[i + 1])
            s += t1 * t1 * (1.0 + t * t)
        t1 = x[dim - 1] - 1.0
        t = sin(TWO_PI * x[dim - 1])
        s += t1 * t1 * (1.0 + t * t)
        total = 0.1 * s
        for i in range(dim):
            total += _penalty(x[i], 5.0)
        return total
    if code == 14:  # foxholes
        inner = 1.0 / 500.0
        for j in range(25):
            d1 = x[0] - _FOX[j % 5]
            d2 = x[1] - _FOX[j / 5]
            t1 = d1 * d1
            t2 = d2 * d2
            inner += 1.0 / ((j + 1.0) + t1 * t1 * t1 + t2 * t2 * t2)
        return 1.0 / inner
    if code == 15:  # kowalik
        s = 0.0
        for i in range(11):
            b = _KOW_B[i]
            num = x[0] * (b * b + b * x[1])
            den = b * b + b * x[2] + x[3]
            t = _KOW_A[i] - num / den
            s += t * t
        return s
    if code == 16:  # six-hump camel
        x1 = x[0]
        x2 = x[1]
        x1_2 = x1 * x1
        x1_4 = x1_2 * x1_2
        x2_2 = x2 * x2
        return (4.0 * x1_2 - 2.1 * x1_4 + (x1_4 * x1_2) / 3.0 + x1 * x2
                - 4.0 * x2_2 + 4.0 * (x2_2 * x2_2))
    if code == 17:  # branin
        x1 = x[0]
        x2 = x[1]
        t = x2 - 5.1 / (4.0 * M_PI * M_PI) * (x1 * x1) + 5.0 / M_PI * x1 - 6.0
        return t * t + 10.0 * (1.0 - 1.0 / (8.0 * M_PI)) * cos(x1) + 10.0
    if code == 18:  # goldstein-price
        x1 = x[0]
        x2 = x[1]
        t1 = x1 + x2 + 1.0
        q1 = (19.0 - 14.0 * x1 + 3.0 * (x1 * x1) - 14.0 * x2
              + 6.0 * (x1 * x2) + 3.0 * (x2 * x2))
        t2 = 2.0 * x1 - 3.0 * x2
        q2 = (18.0 - 32.0 * x1 + 12.0 * (x1 * x1) + 48.0 * x2
              - 36.0 * (x1 * x2) + 27.0 * (x2 * x2))
        return (1.0 + (t1 * t1) * q1) * (30.0 + (t2 * t2) * q2)
    if code == 19:  # hartman 3
        s = 0.0
        for i in range(4):
            inner = 0.0
            for j in range(3):
                d = x[j] - _H3_P[i][j]
                inner += _H3_A[i][j] * (d * d)
            s += _HART_C[i] * exp(-inner)
        return -s
    if code == 20:  # hartman 6
        s = 0.0
        for i in range(4):
            inner = 0.0
            for j in range(6):
                d = x[j] - _H6_P[i][j]
                inner += _H6_A[i][j] * (d * d)
            s += _HART_C[i] * exp(-inner)
        return -s
    if code == 21:
        return _shekel_m(x, 5)
    if code == 22:
        return _shekel_m(x, 7)
    # code == 23
    return _shekel_m(x, 10)


cdef inline double _reflect(double v, double lo, double hi) noexcept nogil:
    if v < lo:
        v = 2.0 * lo - v
    elif v > hi:
        v = 2.0 * hi - v
    if v < lo:
        v = lo
    elif v > hi:
        v = hi
    return v


# ---------------------------------------------------------------------------
# engine loop

cdef class _Cell:
    cdef Rng rng
    cdef int func_code, dim, kind
    cdef bint noisy
    cdef double scale
    cdef double en_buff, ini_ke, coll_rate, loss_rate, syn_thres
    cdef long dec_thres
    cdef long n, cap
    cdef double* lower
    cdef double* upper
    cdef double* omega
    cdef double* pe
    cdef double* ke
    cdef double* min_pe
    cdef double* min_struct
    cdef long* num_hit
    cdef long* min_hit
    cdef double* w1
    cdef double* w2
    cdef double* best_struct
    cdef double buffer, best_value
    cdef long fe_used
    cdef long counts[4]
    cdef long accepts[4]

    def __cinit__(self):
        self.lower = NULL
        self.upper = NULL
        self.omega = NULL
        self.pe = NULL
        self.ke = NULL
        self.min_pe = NULL
        self.min_struct = NULL
        self.num_hit = NULL
        self.min_hit = NULL
        self.w1 = NULL
        self.w2 = NULL
        self.best_struct = NULL

    def __dealloc__(self):
        free(self.lower)
        free(self.upper)
        free(self.omega)
        free(self.pe)
        free(self.ke)
        free(self.min_pe)
        free(self.min_struct)
        free(self.num_hit)
        free(self.min_hit)
        free(self.w1)
        free(self.w2)
        free(self.best_struct)

    cdef void _alloc(self, long cap) except *:
        self.cap = cap
        self.omega = <double*>malloc(cap * self.dim * sizeof(double))
        self.pe = <double*>malloc(cap * sizeof(double))
        self.ke = <double*>malloc(cap * sizeof(double))
        self.min_pe = <double*>malloc(cap * sizeof(double))
        self.min_struct = <double*>malloc(cap * self.dim * sizeof(double))
        self.num_hit = <long*>malloc(cap * sizeof(long))
        self.min_hit = <long*>malloc(cap * sizeof(long))
        self.w1 = <double*>malloc(self.dim * sizeof(double))
        self.w2 = <double*>malloc(self.dim * sizeof(double))
        self.best_struct = <double*>malloc(self.dim * sizeof(double))
        self.lower = <double*>malloc(self.dim * sizeof(double))
        self.upper = <double*>malloc(self.dim * sizeof(double))
        if (self.omega == NULL or self.pe == NULL or self.ke == NULL
                or self.min_pe == NULL or self.min_struct == NULL
                or self.num_hit == NULL or self.min_hit == NULL
                or self.w1 == NULL or self.w2 == NULL
                or self.best_struct == NULL or self.lower == NULL
                or self.upper == NULL):
            raise MemoryError()

    cdef void _grow(self) except *:
        cdef long cap = self.cap * 2
        self.omega = <double*>realloc(self.omega, cap * self.dim * sizeof(double))
        self.pe = <double*>realloc(self.pe, cap * sizeof(double))
        self.ke = <double*>realloc(self.ke, cap * sizeof(double))
        self.min_pe = <double*>realloc(self.min_pe, cap * sizeof(double))
        self.min_struct = <double*>realloc(self.min_struct, cap * self.dim * sizeof(double))
        self.num_hit = <long*>realloc(self.num_hit, cap * sizeof(long))
        self.min_hit = <long*>realloc(self.min_hit, cap * sizeof(long))
        if (self.omega == NULL or self.pe == NULL or self.ke == NULL
                or self.min_pe == NULL or self.min_struct == NULL
                or self.num_hit == NULL or self.min_hit == NULL):
            raise MemoryError()
        self.cap = cap

    cdef double _evaluate(self, double* w) noexcept:
        cdef double v = _eval_raw(self.func_code, w, self.dim)
        if self.noisy:
            v += _uniform(&self.rng)
        self.fe_used += 1
        if v < self.best_value:
            self.best_value = v
            memcpy(self.best_struct, w, self.dim * sizeof(double))
        return v

    cdef void _fresh(self, long slot, double* w, double pe, double ke) noexcept:
        memcpy(self.omega + slot * self.dim, w, self.dim * sizeof(double))
        self.pe[slot] = pe
        self.ke[slot] = ke
        self.num_hit[slot] = 0
        self.min_hit[slot] = 0
        self.min_pe[slot] = pe
        memcpy(self.min_struct + slot * self.dim, w, self.dim * sizeof(double))

    cdef void _note_improvement(self, long i) noexcept:
        if self.pe[i] < self.min_pe[i]:
            self.min_pe[i] = self.pe[i]
            memcpy(self.min_struct + i * self.dim, self.omega + i * self.dim,
                   self.dim * sizeof(double))
            self.min_hit[i] = self.num_hit[i]

    cdef void _remove(self, long i) noexcept:
        cdef long tail = self.n - i - 1
        if tail > 0:
            memmove(self.omega + i * self.dim, self.omega + (i + 1) * self.dim,
                    tail * self.dim * sizeof(double))
            memmove(self.min_struct + i * self.dim, self.min_struct + (i + 1) * self.dim,
                    tail * self.dim * sizeof(double))
            memmove(self.pe + i, self.pe + i + 1, tail * sizeof(double))
            memmove(self.ke + i, self.ke + i + 1, tail * sizeof(double))
            memmove(self.min_pe + i, self.min_pe + i + 1, tail * sizeof(double))
            memmove(self.num_hit + i, self.num_hit + i + 1, tail * sizeof(long))
            memmove(self.min_hit + i, self.min_hit + i + 1, tail * sizeof(long))
        self.n -= 1

    cdef void _neighbor(self, double* src, double* dst) noexcept:
        cdef long d = _index_below(&self.rng, self.dim)
        cdef double eps = _sample_eps(&self.rng, self.kind, self.scale)
        memcpy(dst, src, self.dim * sizeof(double))
        dst[d] = _reflect(dst[d] + eps, self.lower[d], self.upper[d])

    cdef void _perturb_all(self, double* src, double* dst) noexcept:
        cdef long d, changed = 0
        cdef double eps
        memcpy(dst, src, self.dim * sizeof(double))
        for d in range(self.dim):
            if _uniform(&self.rng) < 0.5:
                eps = _sample_eps(&self.rng, self.kind, self.scale)
                dst[d] = _reflect(dst[d] + eps, self.lower[d], self.upper[d])
                changed += 1
        if changed == 0:
            d = _index_below(&self.rng, self.dim)
            eps = _sample_eps(&self.rng, self.kind, self.scale)
            dst[d] = _reflect(dst[d] + eps, self.lower[d], self.upper[d])

    cdef void _on_wall(self, long i) noexcept:
        cdef double pe_new, q, t
        self._neighbor(self.omega + i * self.dim, self.w1)
        pe_new = self._evaluate(self.w1)
        self.num_hit[i] += 1
        self.counts[0] += 1
        q = self.pe[i] - pe_new + self.ke[i]
        if q >= 0.0:
            t = self.loss_rate + _uniform(&self.rng) * (1.0 - self.loss_rate)
            memcpy(self.omega + i * self.dim, self.w1, self.dim * sizeof(double))
            self.pe[i] = pe_new
            self.ke[i] = q * t
            self.buffer += q * (1.0 - t)
            self._note_improvement(i)
            self.accepts[0] += 1

    cdef void _decomposition(self, long i) except *:
        cdef double pe1, pe2, temp, avail, k, ke1, ke2, m1, m2, m3, m4
        self._perturb_all(self.omega + i * self.dim, self.w1)
        self._perturb_all(self.omega + i * self.dim, self.w2)
        pe1 = self._evaluate(self.w1)
        pe2 = self._evaluate(self.w2)
        self.counts[1] += 1
        temp = self.pe[i] + self.ke[i] - pe1 - pe2
        if temp >= 0.0:
            k = _uniform(&self.rng)
            ke1 = temp * k
            ke2 = temp * (1.0 - k)
        else:
            avail = temp + self.buffer
            if avail >= 0.0:
                m1 = _uniform(&self.rng)
                m2 = _uniform(&self.rng)
                m3 = _uniform(&self.rng)
                m4 = _uniform(&self.rng)
                ke1 = avail * m1 * m2
                ke2 = (avail - ke1) * m3 * m4
                self.buffer = avail - ke1 - ke2
            else:
                self.num_hit[i] += 1
                return
        if self.n == self.cap:
            self._grow()
        self._fresh(i, self.w1, pe1, ke1)
        self._fresh(self.n, self.w2, pe2, ke2)
        self.n += 1
        self.accepts[1] += 1

    cdef void _intermolecular(self, long i, long j) noexcept:
        cdef double pe1, pe2, e, k
        self._neighbor(self.omega + i * self.dim, self.w1)
        self._neighbor(self.omega + j * self.dim, self.w2)
        pe1 = self._evaluate(self.w1)
        pe2 = self._evaluate(self.w2)
        self.num_hit[i] += 1
        self.num_hit[j] += 1
        self.counts[2] += 1
        e = self.pe[i] + self.pe[j] + self.ke[i] + self.ke[j] - (pe1 + pe2)
        if e >= 0.0:
            k = _uniform(&self.rng)
            memcpy(self.omega + i * self.dim, self.w1, self.dim * sizeof(double))
            self.pe[i] = pe1
            self.ke[i] = e * k
            memcpy(self.omega + j * self.dim, self.w2, self.dim * sizeof(double))
            self.pe[j] = pe2
            self.ke[j] = e * (1.0 - k)
            self._note_improvement(i)
            self._note_improvement(j)
            self.accepts[2] += 1

    cdef void _synthesis(self, long i, long j) noexcept:
        cdef long d, lo_idx, hi_idx
        cdef double pe_new, ke_new
        cdef double* oi = self.omega + i * self.dim
        cdef double* oj = self.omega + j * self.dim
        for d in range(self.dim):
            if _uniform(&self.rng) < 0.5:
                self.w1[d] = oi[d]
            else:
                self.w1[d] = oj[d]
        pe_new = self._evaluate(self.w1)
        self.counts[3] += 1
        ke_new = self.pe[i] + self.pe[j] + self.ke[i] + self.ke[j] - pe_new
        if ke_new >= 0.0:
            if i < j:
                lo_idx = i
                hi_idx = j
            else:
                lo_idx = j
                hi_idx = i
            self._fresh(lo_idx, self.w1, pe_new, ke_new)
            self._remove(hi_idx)
            self.accepts[3] += 1
        else:
            self.num_hit[i] += 1
            self.num_hit[j] += 1

    cdef void _react_once(self) except *:
        cdef double r = _uniform(&self.rng)
        cdef long n = self.n
        cdef long i, j
        if r > self.coll_rate or n == 1:
            i = _index_below(&self.rng, n)
            if self.num_hit[i] - self.min_hit[i] > self.dec_thres:
                self._decomposition(i)
            else:
                self._on_wall(i)
        else:
            i = _index_below(&self.rng, n)
            j = _index_below(&self.rng, n - 1)
            if j >= i:
                j += 1
            if self.ke[i] <= self.syn_thres and self.ke[j] <= self.syn_thres:
                self._synthesis(i, j)
            else:
                self._intermolecular(i, j)

    cdef double _total_energy(self) noexcept:
        cdef double s = 0.0
        cdef long i
        for i in range(self.n):
            s += self.pe[i] + self.ke[i]
        s += self.buffer
        return s


def run_cell(int func_code, int dim, object lower, object upper, bint noisy,
             int dist_code, double scale,
             int pop_size, double en_buff, double ini_ke, double coll_rate,
             double loss_rate, long dec_thres, double syn_thres,
             unsigned long long seed, long fe_limit,
             bint audit=False, long trace_stride=0):
    """One full optimization run; returns (best_value, best_struct, fe_used,
    max_energy_drift | None, trace | None, counts, accepts)."""
    if fe_limit < pop_size:
        raise ValueError(f"fe_limit {fe_limit} is below pop_size {pop_size}")
    cdef _Cell cell = _Cell()
    cell.func_code = func_code
    cell.dim = dim
    cell.noisy = noisy
    cell.kind = dist_code
    cell.scale = scale
    cell.en_buff = en_buff
    cell.ini_ke = ini_ke
    cell.coll_rate = coll_rate
    cell.loss_rate = loss_rate
    cell.dec_thres = dec_thres
    cell.syn_thres = syn_thres
    cell._alloc(pop_size + 16)
    cdef int d
    for d in range(dim):
        cell.lower[d] = lower[d]
        cell.upper[d] = upper[d]
    _rng_seed(&cell.rng, seed)

    cdef long m
    cdef double pe0
    cell.n = 0
    cell.buffer = en_buff
    cell.best_value = float("inf")
    cell.fe_used = 0
    for m in range(pop_size):
        for d in range(dim):
            cell.w1[d] = cell.lower[d] + _uniform(&cell.rng) * (cell.upper[d] - cell.lower[d])
        pe0 = cell._evaluate(cell.w1)
        cell._fresh(m, cell.w1, pe0, ini_ke)
        cell.n += 1

    cdef double e0 = cell._total_energy() if audit else 0.0
    cdef double max_drift = 0.0
    cdef double drift
    trace = [] if trace_stride > 0 else None
    cdef long next_mark = 0
    cdef long last_traced = -1
    if trace is not None:
        trace.append((cell.fe_used, cell.best_value))
        last_traced = cell.fe_used
        next_mark = (cell.fe_used // trace_stride + 1) * trace_stride

    while cell.fe_used < fe_limit:
        cell._react_once()
        if audit:
            drift = fabs(cell._total_energy() - e0)
            if drift > max_drift:
                max_drift = drift
        if trace is not None and cell.fe_used >= next_mark:
            trace.append((cell.fe_used, cell.best_value))
            last_traced = cell.fe_used
            next_mark = (cell.fe_used // trace_stride + 1) * trace_stride
    if trace is not None and last_traced != cell.fe_used:
        trace.append((cell.fe_used, cell.best_value))

    best_struct = [cell.best_struct[d] for d in range(dim)]
    counts = (cell.counts[0], cell.counts[1], cell.counts[2], cell.counts[3])
    accepts = (cell.accepts[0], cell.accepts[1], cell.accepts[2], cell.accepts[3])
    return (cell.best_value, best_struct, cell.fe_used,
            max_drift if audit else None, trace, counts, accepts)


def sample_batch(int dist_code, double scale, long n, unsigned long long seed):
    """n perturbation draws from a fresh stream (mirrors sample_many)."""
    cdef Rng rng
    _rng_seed(&rng, seed)
    cdef long i
    out = []
    for i in range(n):
        out.append(_sample_eps(&rng, dist_code, scale))
    return out


def eval_point(int func_code, object x):
    """Noise-free objective value at x (equivalence-test surface)."""
    cdef int dim = len(x)
    cdef double* buf = <double*>malloc(dim * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef int d
    cdef double v
    try:
        for d in range(dim):
            buf[d] = x[d]
        v = _eval_raw(func_code, buf, dim)
    finally:
        free(buf)
    return v


def rng_u64_sequence(unsigned long long seed, long n):
    """Raw 64-bit outputs (equivalence-test surface)."""
    cdef Rng rng
    _rng_seed(&rng, seed)
    return [_rng_next(&rng) for _ in range(n)]


def rng_uniform_sequence(unsigned long long seed, long n):
    """[0, 1) uniforms (equivalence-test surface)."""
    cdef Rng rng
    _rng_seed(&rng, seed)
    return [_uniform(&rng) for _ in range(n)]
