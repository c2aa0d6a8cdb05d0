"""Matrix representations of cos(theta), cos^2(theta) and J^2 in a truncated
spherical-harmonic basis {|j, m> : j = |m| ... j_max} at fixed m.

All three operators are real symmetric and banded. Only the diagonal and
upper bands are stored; :meth:`BandedSymmetricOperator.dense` mirrors them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray


class InvalidBasisError(ValueError):
    """Raised when a basis has fewer than two levels or is otherwise malformed."""


@dataclass(frozen=True)
class AngularBasis:
    """Rotational levels j = |m| ... j_max at a fixed magnetic quantum number m."""

    m: int
    j_max: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.j_max) != self.j_max:
            raise InvalidBasisError(f"m and j_max must be integers, got m={self.m}, j_max={self.j_max}")
        if self.j_max < abs(self.m) + 1:
            raise InvalidBasisError(
                f"basis needs dimension >= 2: j_max={self.j_max} < |m|+1={abs(self.m) + 1}"
            )

    @property
    def j_min(self) -> int:
        return abs(self.m)

    @property
    def dimension(self) -> int:
        return self.j_max - abs(self.m) + 1

    @property
    def j_values(self) -> NDArray[np.int64]:
        """j label of each basis index."""
        return np.arange(self.j_min, self.j_max + 1)

    def index_of(self, j: int) -> int:
        if not self.j_min <= j <= self.j_max:
            raise InvalidBasisError(f"j={j} outside basis [{self.j_min}, {self.j_max}]")
        return j - self.j_min

    def enlarged(self, extra: int) -> "AngularBasis":
        return AngularBasis(self.m, self.j_max + extra)


@dataclass(frozen=True, eq=False)
class BandedSymmetricOperator:
    """Real symmetric banded matrix; ``bands[k]`` is the k-th upper diagonal."""

    basis: AngularBasis
    bands: tuple[NDArray[np.float64], ...]
    name: str = ""

    def __post_init__(self):
        n = self.basis.dimension
        if not 1 <= len(self.bands) <= 3:
            raise ValueError("bandwidth must be 0, 1 or 2")
        for k, band in enumerate(self.bands):
            if band.shape != (n - k,):
                raise ValueError(f"band {k} has length {band.shape}, expected {n - k}")
            band.setflags(write=False)

    @property
    def bandwidth(self) -> int:
        return len(self.bands) - 1

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def dense(self) -> NDArray[np.float64]:
        out = np.diag(self.bands[0]).astype(float)
        for k in range(1, len(self.bands)):
            out += np.diag(self.bands[k], k) + np.diag(self.bands[k], -k)
        return out

    def upper_banded(self) -> NDArray[np.float64]:
        """LAPACK upper banded storage, as expected by ``scipy.linalg.eig_banded``."""
        w, n = self.bandwidth, self.dimension
        ab = np.zeros((w + 1, n))
        for k, band in enumerate(self.bands):
            ab[w - k, k:] = band
        return ab

    def matvec(self, vec: NDArray) -> NDArray:
        out = self.bands[0] * vec
        for k in range(1, len(self.bands)):
            out[:-k] += self.bands[k] * vec[k:]
            out[k:] += self.bands[k] * vec[:-k]
        return out

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha1(f"{self.name}|{self.basis.m}|{self.basis.j_max}".encode())
        for band in self.bands:
            h.update(np.ascontiguousarray(band).tobytes())
        return h.hexdigest()[:12]

    def entries(self):
        """Yield (j_row, j_col, value) for every stored nonzero, both triangles."""
        js = self.basis.j_values
        for k, band in enumerate(self.bands):
            for i, value in enumerate(band):
                if value == 0.0:
                    continue
                yield int(js[i]), int(js[i + k]), float(value)
                if k:
                    yield int(js[i + k]), int(js[i]), float(value)


def cos_theta_element(j, m: int = 0):
    """<j, m| cos(theta) |j+1, m>."""
    j = np.asarray(j, dtype=float)
    return np.sqrt(((j + 1) ** 2 - m * m) / ((2 * j + 1) * (2 * j + 3)))


def _check(basis: AngularBasis) -> None:
    if basis.dimension < 2:
        raise InvalidBasisError(f"basis dimension {basis.dimension} < 2")


def build_cos_theta(basis: AngularBasis) -> BandedSymmetricOperator:
    _check(basis)
    js = basis.j_values
    off = cos_theta_element(js[:-1], basis.m)
    return BandedSymmetricOperator(basis, (np.zeros(basis.dimension), off), name="cos")


def build_cos2_theta(basis: AngularBasis) -> BandedSymmetricOperator:
    """cos^2(theta) from cos(theta) on a basis two levels larger, squared, then truncated.

    Squaring on the enlarged basis makes every retained element exact.
    """
    _check(basis)
    big = build_cos_theta(basis.enlarged(2))
    d = big.bands[1]
    n = basis.dimension
    diag = np.zeros(n + 2)
    diag[:-1] += d**2
    diag[1:] += d**2
    band2 = d[:-1] * d[1:]
    return BandedSymmetricOperator(
        basis, (diag[:n].copy(), np.zeros(n - 1), band2[: n - 2].copy()), name="cos2"
    )


def build_j_squared(basis: AngularBasis) -> BandedSymmetricOperator:
    _check(basis)
    js = basis.j_values.astype(float)
    return BandedSymmetricOperator(basis, (js * (js + 1),), name="j2")


@lru_cache(maxsize=512)
def operator(kind: str, m: int, j_max: int) -> BandedSymmetricOperator:
    """Cached constructor keyed on (kind, m, j_max); kind in {'cos', 'cos2', 'j2'}."""
    builders = {"cos": build_cos_theta, "cos2": build_cos2_theta, "j2": build_j_squared}
    try:
        build = builders[kind]
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}") from None
    return build(AngularBasis(m, j_max))
