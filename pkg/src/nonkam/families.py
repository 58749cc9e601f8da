"""Constructors for the Arnold family and its frequency-n modifications."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .circlemap import CircleLift, MAX_FREQUENCY
from .errors import CertificateError
from .rotation import rotation_number

TWO_PI = 2.0 * math.pi


def arnold(lam: float, sigma: float) -> CircleLift:
    """``x + lam + sigma / (2 pi) sin(2 pi x)`` for ``0 <= sigma < 1``."""
    if not 0.0 <= sigma < 1.0:
        raise CertificateError(f"Arnold family needs 0 <= sigma < 1, got {sigma}")
    return CircleLift(lam, ((sigma / TWO_PI, 1, 0.0),))


def _check_frequency(n: int, kappa: float):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > MAX_FREQUENCY:
        raise ValueError("n exceeds 2**31 - 1")
    if not kappa * math.log(n) > math.log(TWO_PI):
        raise CertificateError(f"need n**kappa > 2 pi, got n = {n}, kappa = {kappa}")


def min_frequency(kappa: float) -> int:
    """Smallest integer ``N`` with ``N**kappa > 2 pi``."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    n = max(1, math.floor(TWO_PI ** (1.0 / kappa)))
    while not float(n) ** kappa > TWO_PI:
        n += 1
    return n


def modified_g(beta: float, n: int, kappa: float) -> CircleLift:
    """``x + beta + n**-(kappa + 1) sin(2 pi n x)``."""
    _check_frequency(n, kappa)
    return CircleLift(beta, ((float(n) ** -(kappa + 1.0), int(n), 0.0),))


def modified_f(beta: float, n: int, kappa: float) -> CircleLift:
    """``x + n beta + n**-kappa sin(2 pi x)``; conjugate to ``modified_g`` by ``x -> n x``."""
    _check_frequency(n, kappa)
    return CircleLift(n * beta, ((float(n) ** -kappa, 1, 0.0),))


def nonkam_g(beta: float, n: int, iota: int, nu: float) -> CircleLift:
    """``x + beta + n**-(iota - nu) sin(2 pi n x)``, i.e. ``modified_g`` with kappa = iota - nu - 1."""
    return modified_g(beta, n, iota - nu - 1.0)


@dataclass(frozen=True)
class FamilySpec:
    """A named family member: ``kind`` in {arnold, modified_g, modified_f}.

    ``params`` is ``(lam, sigma)`` for arnold and ``(beta, n, kappa)`` for
    the modified families.
    """

    kind: str
    params: tuple

    def build(self) -> CircleLift:
        builders = {"arnold": arnold, "modified_g": modified_g, "modified_f": modified_f}
        if self.kind not in builders:
            raise ValueError(f"unknown family kind {self.kind!r}")
        return builders[self.kind](*self.params)


def scaling_check(beta: float, n: int, kappa: float, N: int = 1_000_000,
                  method: str = "weighted_birkhoff") -> float:
    """``|rho(modified_g) - rho(modified_f) / n|`` from two independent orbits."""
    rho_g = rotation_number(modified_g(beta, n, kappa), method, N).value
    rho_f = rotation_number(modified_f(beta, n, kappa), method, N).value
    return abs(rho_g - rho_f / n)
