# cython: language_level=3
"""Compiled fast-doubling kernel for Chebyshev evaluation mod p.

Moduli that fit in 64 bits run on native integers with 128-bit products;
larger moduli use arbitrary-precision arithmetic inside the same compiled
loop. Both paths implement the identical doubling recurrence as the pure
kernel, so the two backends are interchangeable bit for bit.
"""

from libc.stdint cimport uint64_t

cdef extern from *:
    """
    #include <stdint.h>

    static inline uint64_t cheb_mulmod(uint64_t a, uint64_t b, uint64_t p) {
        return (uint64_t)((unsigned __int128)a * b % p);
    }
    static inline uint64_t cheb_addmod(uint64_t a, uint64_t b, uint64_t p) {
        unsigned __int128 s = (unsigned __int128)a + b;
        return (uint64_t)(s >= p ? s - p : s);
    }
    static inline uint64_t cheb_submod(uint64_t a, uint64_t b, uint64_t p) {
        return a >= b ? a - b : a + (p - b);
    }
    """
    uint64_t cheb_mulmod(uint64_t a, uint64_t b, uint64_t p) nogil
    uint64_t cheb_addmod(uint64_t a, uint64_t b, uint64_t p) nogil
    uint64_t cheb_submod(uint64_t a, uint64_t b, uint64_t p) nogil

BACKEND_NAME = "compiled"


def cheb_eval_int(n, x, p):
    """T_n(x) mod p by fast doubling; exponent and modulus may be any size."""
    if n < 0:
        raise ValueError("exponent must be non-negative")
    if p < 2:
        raise ValueError("modulus must be >= 2")
    if p.bit_length() <= 64:
        return _eval_native(n, x % p, p)
    return _eval_object(n, x % p, p)


cdef uint64_t _step_bits(const unsigned char* buf, Py_ssize_t nlen,
                         uint64_t x, uint64_t p) noexcept nogil:
    cdef uint64_t one = 1 % p
    cdef uint64_t t0 = one
    cdef uint64_t t1 = x
    cdef uint64_t cross, sq
    cdef Py_ssize_t i
    cdef int j
    cdef unsigned char byte
    for i in range(nlen):
        byte = buf[i]
        for j in range(7, -1, -1):
            cross = cheb_mulmod(t0, t1, p)
            if (byte >> j) & 1:
                sq = cheb_mulmod(t1, t1, p)
                t0 = cheb_submod(cheb_addmod(cross, cross, p), x, p)
                t1 = cheb_submod(cheb_addmod(sq, sq, p), one, p)
            else:
                sq = cheb_mulmod(t0, t0, p)
                t0 = cheb_submod(cheb_addmod(sq, sq, p), one, p)
                t1 = cheb_submod(cheb_addmod(cross, cross, p), x, p)
    return t0


cdef object _eval_native(object n, object x0, object p0):
    cdef uint64_t p = p0
    cdef uint64_t x = x0
    # Walking every bit of the big-endian byte expansion is safe: a 0 step
    # maps the initial pair (T_0, T_1) to itself, so leading zeros are no-ops.
    cdef bytes nbytes = n.to_bytes(max(1, (n.bit_length() + 7) // 8), "big")
    cdef const unsigned char* buf = nbytes
    cdef Py_ssize_t nlen = len(nbytes)
    cdef uint64_t result
    with nogil:
        result = _step_bits(buf, nlen, x, p)
    return result


cdef object _eval_object(object n, object x, object p):
    cdef object t0 = 1 % p
    cdef object t1 = x
    cdef Py_ssize_t i
    for i in range(<Py_ssize_t> n.bit_length() - 1, -1, -1):
        if (n >> i) & 1:
            t0, t1 = (2 * t0 * t1 - x) % p, (2 * t1 * t1 - 1) % p
        else:
            t0, t1 = (2 * t0 * t0 - 1) % p, (2 * t0 * t1 - x) % p
    return t0
