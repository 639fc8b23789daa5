"""Seedable pseudo-random generator with a pinned, portable algorithm.

Synthetic datasets are part of the package's external contract: the same
(spec, seed) pair must reproduce bit-for-bit across runs, machines, and
reimplementations in other languages. Library RNGs do not guarantee that
across versions, so the generator is pinned here:

``pcg32`` (algorithm id ``"pcg32/1"``)
    PCG XSH-RR 64/32 by M.E. O'Neill (pcg-random.org), exactly the
    reference "minimal C" variant: 64-bit LCG state advance
    ``state' = state * 6364136223846793005 + inc`` with the XSH-RR output
    permutation of the *old* state. Seeding follows ``pcg32_srandom_r``:
    zero the state, advance once, add the seed, advance again.

Uniform doubles are ``(u32 + 0.5) * 2**-32``, which lies strictly inside
(0, 1) so the inverse normal CDF below never sees 0 or 1.

Gaussian deviates use inverse-transform sampling: one uniform per deviate,
mapped through ``normal_inverse_cdf`` (Wichura's AS241 PPND16 rational
approximation, accurate to ~1e-16). Inverse transform is chosen over
Box-Muller so there is no pair caching and no cross-language ambiguity
about consumption order: deviate i consumes exactly the i-th uniform.
"""

from __future__ import annotations

import math

ALGORITHM_ID = "pcg32/1"

_MASK64 = 0xFFFF_FFFF_FFFF_FFFF
_MASK32 = 0xFFFF_FFFF
_MULTIPLIER = 6364136223846793005


class Pcg32:
    """PCG XSH-RR 64/32 stream.

    ``seed`` selects the starting state, ``stream`` the increment sequence
    (any two distinct streams are independent). Both default-fit in 64 bits.
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be non-negative integers")
        self._state = 0
        self._inc = ((stream << 1) | 1) & _MASK64
        self.next_uint32()
        self._state = (self._state + (seed & _MASK64)) & _MASK64
        self.next_uint32()

    def next_uint32(self) -> int:
        """Next raw 32-bit output."""
        old = self._state
        self._state = (old * _MULTIPLIER + self._inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _MASK32

    def next_uniform(self) -> float:
        """Uniform double in the open interval (0, 1)."""
        return (self.next_uint32() + 0.5) * 2.0**-32

    def next_normal(self, mean: float = 0.0, sigma: float = 1.0) -> float:
        """Gaussian deviate via inverse-transform of one uniform."""
        return mean + sigma * normal_inverse_cdf(self.next_uniform())

    def next_below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by rejection (pcg32_boundedrand_r)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (0x1_0000_0000 - bound) % bound
        while True:
            r = self.next_uint32()
            if r >= threshold:
                return r % bound

    def choose_distinct(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), by partial Fisher-Yates shuffle."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        idx = list(range(n))
        for i in range(k):
            j = i + self.next_below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k]


# AS241 PPND16 coefficients (Wichura 1988), double-precision variant.
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
      5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
      2.8729085735721942674e4, 5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15)


def _poly(coeffs, r: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def normal_inverse_cdf(p: float) -> float:
    """Standard normal quantile function, AS241 algorithm PPND16.

    Valid for p strictly inside (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        value = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        value = _poly(_E, r) / _poly(_F, r)
    return -value if q < 0.0 else value
