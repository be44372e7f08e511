# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernel.

A line-for-line twin of the reference implementation in
``gkptrack.protocols`` / ``gkptrack.codes``: the same draw order off the same
bit generator, Gaussian draws via numpy's C distribution functions (the exact
routine behind ``Generator.standard_normal``), and the same canonical
summation orders in the decoder.  For a given Philox key both kernels
therefore produce identical failure counts, which the test suite asserts.
"""

from libc.math cimport ceil, exp, fabs, log, log1p
from libc.stdlib cimport free, malloc
from cpython.pycapsule cimport PyCapsule_GetPointer

from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_normal,
    random_standard_uniform,
)

from .. import codes as _codes
from .. import gkp as _gkp
from ..protocols import joint_likelihood as _joint_likelihood

# --- constants and code tables baked from the reference modules -------------

cdef double SQRT_PI = _gkp.SQRT_PI
cdef double HALF_LOG_2PI = _gkp._HALF_LOG_2PI
cdef double LOG_2 = log(2.0)
cdef double NEG_INF = float("-inf")

cdef int C4_MASKS[4][2]
cdef int C6_TRIP[4][4][3]

def _bake_tables():
    c4 = _codes.c4_table()
    for ci in range(4):
        words = c4.codewords[_codes.PAIR_VALUE[ci]]
        for wi in range(2):
            mask = 0
            for i, b in enumerate(words[wi]):
                mask |= b << i
            C4_MASKS[ci][wi] = mask
    for ci in range(4):
        for wi in range(4):
            for j in range(3):
                C6_TRIP[ci][wi][j] = _codes.C6_PAIR_TRIPLES[ci][wi][j]

_bake_tables()

# --- canonical float helpers (mirrors of codes.py / protocols.py) ------------

cdef inline long lattice_index(double x) noexcept nogil:
    return <long>ceil(x / SQRT_PI - 0.5)

cdef inline double lse2(double a, double b) noexcept nogil:
    # mirror of codes.logaddexp2 / protocols._lse2
    cdef double m, d
    if a == b:
        if a == NEG_INF:
            return a
        return a + LOG_2
    if a > b:
        m = a
        d = b - a
    else:
        m = b
        d = a - b
    return m + log1p(exp(d))

cdef inline double lse_sorted(double* v, int k) noexcept nogil:
    # mirror of codes.logsumexp_sorted: descending insertion sort, then
    # accumulate exp(v - max) in order and finish with log()
    cdef int i, j
    cdef double key, m, acc
    for i in range(1, k):
        key = v[i]
        j = i - 1
        while j >= 0 and v[j] < key:
            v[j + 1] = v[j]
            j -= 1
        v[j + 1] = key
    m = v[0]
    if m == NEG_INF:
        return m
    acc = 1.0
    for i in range(1, k):
        acc += exp(v[i] - m)
    return m + log(acc)

cdef inline double word_sum(int mask, int n, int* bits, double* lm, double* lf) noexcept nogil:
    # matched and mismatched sums kept separate, index order (codes._word_sum)
    cdef double sm = 0.0
    cdef double sf = 0.0
    cdef int i
    for i in range(n):
        if ((mask >> i) & 1) == bits[i]:
            sm += lm[i]
        else:
            sf += lf[i]
    return sm + sf

cdef void c4_block_table(int* bits, double* lm, double* lf, double* out) noexcept nogil:
    cdef int ci
    cdef double vals[2]
    for ci in range(4):
        vals[0] = word_sum(C4_MASKS[ci][0], 4, bits, lm, lf)
        vals[1] = word_sum(C4_MASKS[ci][1], 4, bits, lm, lf)
        out[ci] = lse_sorted(vals, 2)

cdef void c6_fold(double* t, double* out) noexcept nogil:
    # t: three consecutive 4-entry tables; out: one 4-entry table
    cdef int ci, wi
    cdef double vals[4]
    for ci in range(4):
        for wi in range(4):
            vals[wi] = (t[C6_TRIP[ci][wi][0]]
                        + t[4 + C6_TRIP[ci][wi][1]]
                        + t[8 + C6_TRIP[ci][wi][2]])
        out[ci] = lse_sorted(vals, 4)

cdef int decode_block(int n, int* bits, double* lm, double* lf,
                      double* tab_a, double* tab_b, bitgen_t* bg) noexcept nogil:
    cdef int nb = n / 4
    cdef int b, j
    cdef double* cur = tab_a
    cdef double* nxt = tab_b
    cdef double* tmp
    cdef double l0, l1
    for b in range(nb):
        c4_block_table(&bits[4 * b], &lm[4 * b], &lf[4 * b], &cur[4 * b])
    while nb > 1:
        for j in range(nb / 3):
            c6_fold(&cur[12 * j], &nxt[4 * j])
        tmp = cur
        cur = nxt
        nxt = tmp
        nb = nb / 3
    l0 = lse2(cur[0], cur[1])
    l1 = lse2(cur[2], cur[3])
    if l0 > l1:
        return 0
    if l1 > l0:
        return 1
    return 0 if random_standard_uniform(bg) < 0.5 else 1

cdef inline double log_gauss(double x, double sigma, double log_sigma) noexcept nogil:
    # mirror of gkp.log_gauss with log(sigma) hoisted
    cdef double t = x / sigma
    return -0.5 * t * t - log_sigma - HALF_LOG_2PI

cdef inline double draw(double sigma, bitgen_t* bg) noexcept nogil:
    # zero sigma consumes no draw (protocols._draw)
    if sigma > 0.0:
        return sigma * random_standard_normal(bg)
    return 0.0

cdef inline size_t _pad(size_t value, size_t pad) noexcept nogil:
    return ((value + pad - 1) / pad) * pad

# --- trials -------------------------------------------------------------------

cdef int conventional_trial(int n, int cycles, bint analog,
                            double sigma, double log_sigma,
                            double lgp, double lgq,
                            int* bits, double* lm, double* lf,
                            double* tab_a, double* tab_b, bitgen_t* bg) noexcept nogil:
    cdef int parity = 0
    cdef int c, i
    cdef long s
    cdef double dev, dm, a
    for c in range(cycles):
        for i in range(n):
            dev = draw(sigma, bg)
            s = lattice_index(dev)
            bits[i] = <int>(s & 1)
            if analog:
                dm = dev - s * SQRT_PI
                a = fabs(dm)
                lm[i] = log_gauss(a, sigma, log_sigma)
                lf[i] = log_gauss(SQRT_PI - a, sigma, log_sigma)
            else:
                lm[i] = lgp
                lf[i] = lgq
        parity ^= decode_block(n, bits, lm, lf, tab_a, tab_b, bg)
    return parity

cdef int tracking_trial(int n, int cycles, bint analog, int quad_p,
                        double sigma, double log_sigma, double sig_anc,
                        double lgp, double lgq, double dig_even, double dig_odd,
                        int* bits, int* flips, double* devs, double* recs,
                        double* lm, double* lf,
                        double* tab_a, double* tab_b, bitgen_t* bg) noexcept nogil:
    cdef int c, i, r
    cdef long s
    cdef double a1, a2, m, dev, even, odd, e, o, ra
    for i in range(n):
        flips[i] = 0
        devs[i] = 0.0
    for c in range(cycles - 1):
        for i in range(n):
            devs[i] = devs[i] + draw(sigma, bg)
            if quad_p == 0:
                # q quadrature (protocols._tracking_single, "q" branch)
                a1 = draw(sig_anc, bg)
                devs[i] = devs[i] + a1
                a2 = draw(sig_anc, bg)
                m = a2 + devs[i]
                s = lattice_index(m)
                recs[i * cycles + c] = m - s * SQRT_PI
                flips[i] ^= <int>(s & 1)
                devs[i] = -a2
            else:
                # p quadrature
                a1 = draw(sig_anc, bg)
                m = a1 - devs[i]
                s = lattice_index(m)
                recs[i * cycles + c] = m - s * SQRT_PI
                flips[i] ^= <int>(s & 1)
                a2 = draw(sig_anc, bg)
                devs[i] = a1 - a2
    for i in range(n):
        devs[i] = devs[i] + draw(sigma, bg)
        s = lattice_index(devs[i])
        bits[i] = flips[i] ^ <int>(s & 1)
        recs[i * cycles + (cycles - 1)] = devs[i] - s * SQRT_PI
        if analog:
            # parity convolution across the cycle records (joint_likelihood)
            ra = fabs(recs[i * cycles])
            even = log_gauss(ra, sigma, log_sigma)
            odd = log_gauss(SQRT_PI - ra, sigma, log_sigma)
            for r in range(1, cycles):
                ra = fabs(recs[i * cycles + r])
                e = log_gauss(ra, sigma, log_sigma)
                o = log_gauss(SQRT_PI - ra, sigma, log_sigma)
                even, odd = lse2(even + e, odd + o), lse2(even + o, odd + e)
            lm[i] = even
            lf[i] = odd
        else:
            lm[i] = dig_even
            lf[i] = dig_odd
    return decode_block(n, bits, lm, lf, tab_a, tab_b, bg)

# --- entry point ---------------------------------------------------------------

def run_block(params, generator, Py_ssize_t trials):
    """Run ``trials`` trials; returns (failures, failures_p) like pure.run_block."""
    cdef int n = 4 * 3 ** (params.level - 1)
    cdef int cycles = params.cycles
    cdef bint analog = params.analog
    cdef bint tracking = params.protocol == "tracking"
    cdef int quad_mode  # 0 = q, 1 = p, 2 = both
    if params.quadrature == "q":
        quad_mode = 0
    elif params.quadrature == "p":
        quad_mode = 1
    else:
        quad_mode = 2
    cdef double sigma = params.sigma_cycle
    cdef double sig_anc_q = params.sigma_ancilla_q
    cdef double sig_anc_p = params.sigma_ancilla_p
    if sigma == 0.0:
        # trivially clean trials; same contract as the pure protocol path
        if sig_anc_q > 0.0 or sig_anc_p > 0.0:
            raise ValueError("sigma_channel = 0 with ancilla noise leaves likelihoods undefined")
        return 0, 0
    cdef double log_sigma = log(sigma) if sigma > 0.0 else 0.0

    # likelihood constants computed through the reference implementations so
    # that both kernels share the exact same doubles
    cdef double lgp = 0.0, lgq = 0.0, dig_even = 0.0, dig_odd = 0.0
    if not analog:
        pair = _gkp.digital_likelihoods(sigma)
        lgp = pair.l_match
        lgq = pair.l_flip
        if tracking:
            joint = _joint_likelihood([0.0] * cycles, sigma, False)
            dig_even = joint.l_match
            dig_odd = joint.l_flip

    cdef bitgen_t* bg = <bitgen_t*>PyCapsule_GetPointer(
        generator.bit_generator.capsule, "BitGenerator")

    # one padded arena per call: concurrent blocks on separate threads must
    # not share cache lines, or the per-trial buffer writes false-share and
    # threading anti-scales badly
    cdef size_t PAD = 128
    cdef size_t off_bits = PAD
    cdef size_t off_flips = _pad(off_bits + n * sizeof(int), PAD)
    cdef size_t off_devs = _pad(off_flips + n * sizeof(int), PAD)
    cdef size_t off_recs = _pad(off_devs + n * sizeof(double), PAD)
    cdef size_t off_lm = _pad(off_recs + n * cycles * sizeof(double), PAD)
    cdef size_t off_lf = _pad(off_lm + n * sizeof(double), PAD)
    cdef size_t off_ta = _pad(off_lf + n * sizeof(double), PAD)
    cdef size_t off_tb = _pad(off_ta + n * sizeof(double), PAD)
    cdef size_t total = _pad(off_tb + n * sizeof(double), PAD) + PAD
    cdef char* arena = <char*>malloc(total)
    if arena == NULL:
        raise MemoryError
    cdef size_t shift = PAD - (<size_t>arena) % PAD
    cdef char* base = arena + shift
    cdef int* bits = <int*>(base + off_bits - PAD)
    cdef int* flips = <int*>(base + off_flips - PAD)
    cdef double* devs = <double*>(base + off_devs - PAD)
    cdef double* recs = <double*>(base + off_recs - PAD)
    cdef double* lm = <double*>(base + off_lm - PAD)
    cdef double* lf = <double*>(base + off_lf - PAD)
    cdef double* tab_a = <double*>(base + off_ta - PAD)
    cdef double* tab_b = <double*>(base + off_tb - PAD)

    cdef long failures = 0
    cdef long failures_p = 0
    cdef Py_ssize_t t
    try:
        with nogil:
            for t in range(trials):
                if quad_mode == 2:
                    failures += _one_trial(tracking, n, cycles, analog, 0,
                                           sigma, log_sigma, sig_anc_q,
                                           lgp, lgq, dig_even, dig_odd,
                                           bits, flips, devs, recs, lm, lf,
                                           tab_a, tab_b, bg)
                    failures_p += _one_trial(tracking, n, cycles, analog, 1,
                                             sigma, log_sigma, sig_anc_p,
                                             lgp, lgq, dig_even, dig_odd,
                                             bits, flips, devs, recs, lm, lf,
                                             tab_a, tab_b, bg)
                else:
                    failures += _one_trial(tracking, n, cycles, analog, quad_mode,
                                           sigma, log_sigma,
                                           sig_anc_q if quad_mode == 0 else sig_anc_p,
                                           lgp, lgq, dig_even, dig_odd,
                                           bits, flips, devs, recs, lm, lf,
                                           tab_a, tab_b, bg)
    finally:
        free(arena)
    return int(failures), int(failures_p)

cdef inline int _one_trial(bint tracking, int n, int cycles, bint analog, int quad_p,
                           double sigma, double log_sigma, double sig_anc,
                           double lgp, double lgq, double dig_even, double dig_odd,
                           int* bits, int* flips, double* devs, double* recs,
                           double* lm, double* lf,
                           double* tab_a, double* tab_b, bitgen_t* bg) noexcept nogil:
    if tracking:
        return tracking_trial(n, cycles, analog, quad_p, sigma, log_sigma, sig_anc,
                              lgp, lgq, dig_even, dig_odd,
                              bits, flips, devs, recs, lm, lf, tab_a, tab_b, bg)
    return 1 if conventional_trial(n, cycles, analog, sigma, log_sigma, lgp, lgq,
                                   bits, lm, lf, tab_a, tab_b, bg) else 0

# --- introspection helpers for the test suite ---------------------------------

def _debug_normals(generator, Py_ssize_t count):
    """Standard normals drawn through the C API (stream-identity check)."""
    cdef bitgen_t* bg = <bitgen_t*>PyCapsule_GetPointer(
        generator.bit_generator.capsule, "BitGenerator")
    out = []
    cdef Py_ssize_t i
    for i in range(count):
        out.append(random_standard_normal(bg))
    return out

def _debug_uniforms(generator, Py_ssize_t count):
    cdef bitgen_t* bg = <bitgen_t*>PyCapsule_GetPointer(
        generator.bit_generator.capsule, "BitGenerator")
    out = []
    cdef Py_ssize_t i
    for i in range(count):
        out.append(random_standard_uniform(bg))
    return out
