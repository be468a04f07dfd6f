"""Independent oracles for the test suite.

Everything here is deliberately primitive: ascending series, brute-force
double loops, plain quadrature. None of it shares code with the package
under test, so agreement is evidence rather than tautology.
"""

import math

import numpy as np

# Frozen anchors, computed from the ascending series below and cross-checked
# against scipy.special.jv before the package was written. If bessel_j ever
# drifts from these, the oracle itself is broken, not the library.
J1_AT_HALF = 0.24226845767487388
J2_AT_ONE = 0.11490348493190047


def bessel_j(k: int, x: float) -> float:
    """J_k(x) by the ascending series; near machine precision for |x| <= 5,
    which covers every argument the invariant tests produce (2 pi k alpha
    with k <= 8 and alpha <= 0.05).

    J_k(x) = sum_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)
    """
    half = x / 2.0
    term = half**k / math.factorial(k)
    total = term
    for m in range(1, 200):
        term *= -(half * half) / (m * (m + k))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def brute_force_generic(e1, e2, radius):
    """Double loop over lattice points: distinct lengths up to sign.

    Returns (True, None) or (False, ((m,n), (m',n'))). Mirrors nothing from
    the package; O(radius^4) and proud of it.
    """
    r2 = radius * radius
    nmax = int(math.ceil(radius / min(_norm(e1), _norm(e2)))) + 2
    pts = []
    for m in range(-nmax, nmax + 1):
        for n in range(-nmax, nmax + 1):
            if m == 0 and n == 0:
                continue
            v = (m * e1[0] + n * e2[0], m * e1[1] + n * e2[1])
            q = v[0] * v[0] + v[1] * v[1]
            if 0 < q <= r2 * (1 + 1e-12):
                pts.append(((m, n), q))
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (mn, q), (mn2, q2) = pts[i], pts[j]
            if abs(q - q2) <= 1e-10 * max(q, q2):
                if mn != (-mn2[0], -mn2[1]):
                    return False, (mn, mn2)
    return True, None


def _norm(v):
    return math.hypot(v[0], v[1])


def trapezoid_mean(f, n: int) -> complex:
    """(1/n) sum f(j/n): the trapezoid rule for 1-periodic integrands."""
    s = np.arange(n) / n
    return complex(np.mean(f(s)))


def adaptive_integral(f, n: int = 10_000) -> complex:
    """Composite Simpson on [0,1] with n panels, for non-periodic honesty.

    scipy.integrate.quad is avoided here so the oracle has no smart
    machinery at all; Simpson at n = 1e4 is plenty for 1e-10 checks on
    smooth integrands.
    """
    if n % 2:
        n += 1
    x = np.linspace(0.0, 1.0, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return complex(np.sum(w * f(x)) / (3.0 * n))
