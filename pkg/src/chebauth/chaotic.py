"""Extended Chebyshev polynomials over a prime field.

Evaluation is exact modular arithmetic, so the commutative semigroup
identity T_u(T_v(x)) = T_v(T_u(x)) = T_{u*v}(x) holds bit for bit. That
identity is what the key-agreement protocol and its attacks rest on;
floating-point chaotic dynamics are deliberately out of scope.

The evaluation kernel is the hot loop of every simulation, so a compiled
extension is preferred when it is installed. Set CHEBAUTH_BACKEND=pure or
CHEBAUTH_BACKEND=compiled to force one kernel explicitly.
"""

import os
from dataclasses import dataclass

_choice = os.environ.get("CHEBAUTH_BACKEND", "").strip().lower()
if _choice == "pure":
    from . import _cheb_pure as _kernel
elif _choice == "compiled":
    from . import _cheb_core as _kernel
elif _choice == "":
    try:
        from . import _cheb_core as _kernel
    except ImportError:
        from . import _cheb_pure as _kernel
else:
    raise ImportError(
        f"CHEBAUTH_BACKEND={_choice!r} not understood; use 'pure' or 'compiled'"
    )

#: Name of the kernel selected at import time: "compiled" or "pure".
backend_name: str = _kernel.BACKEND_NAME

#: Default modulus: the 256-bit prime 2**256 - 2**32 - 977 (the secp256k1
#: base field prime). Tests override it with small primes such as 17 or 101
#: when comparing against the naive recurrence.
DEFAULT_PRIME = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F


@dataclass(frozen=True)
class FieldElement:
    """An integer in [0, p) with its modulus attached.

    The modulus is assumed prime; primality is validated once at parameter
    setup (see is_probable_prime), not on every element. p > 3 keeps T_0,
    T_1 and the doubling identities non-degenerate.
    """

    value: int
    p: int

    def __post_init__(self):
        if self.p <= 3:
            raise ValueError("modulus must be a prime greater than 3")
        if not 0 <= self.value < self.p:
            raise ValueError("value out of range [0, p)")

    @property
    def byte_width(self) -> int:
        return (self.p.bit_length() + 7) // 8

    def to_bytes(self) -> bytes:
        """Canonical fixed-width big-endian encoding, as hashed on the wire."""
        return self.value.to_bytes(self.byte_width, "big")

    def __str__(self):
        return str(self.value)


def cheb_eval(n: int, x: FieldElement) -> FieldElement:
    """Evaluate T_n(x) mod p in O(log n) field multiplications.

    T_0(x) = 1, T_1(x) = x, T_n(x) = 2*x*T_{n-1}(x) - T_{n-2}(x). n = 0 is
    accepted (and returns 1) even though the protocol never samples it.
    """
    if n < 0:
        raise ValueError("exponent must be non-negative")
    return FieldElement(_kernel.cheb_eval_int(n, x.value, x.p), x.p)


def bits_to_field(bits, p: int) -> FieldElement:
    """Map a bit string to the field: big-endian unsigned integer, reduced mod p.

    Accepts a BitString or raw bytes.
    """
    data = bytes(getattr(bits, "data", bits))
    return FieldElement(int.from_bytes(data, "big") % p, p)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality check.

    Deterministic for n < 3.3e24 with the fixed base set; for larger n a
    strong pseudoprime to all twelve bases is not a practical concern for
    validating configuration input.
    """
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        y = pow(a, d, n)
        if y == 1 or y == n - 1:
            continue
        for _ in range(s - 1):
            y = y * y % n
            if y == n - 1:
                break
        else:
            return False
    return True
