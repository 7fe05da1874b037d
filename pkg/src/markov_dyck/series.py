"""Truncated formal power series with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Mapping, Sequence, Union

Number = Union[int, Fraction]


class FormalPowerSeries:
    """``c0 + c1 z + ... + cN z^N`` modulo ``z^(N+1)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number], degree: int) -> None:
        cs = [Fraction(c) for c in coeffs][: degree + 1]
        cs += [Fraction(0)] * (degree + 1 - len(cs))
        self.coeffs: List[Fraction] = cs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, degree: int) -> "FormalPowerSeries":
        return cls([1], degree)

    @classmethod
    def from_mapping(cls, m: Mapping[int, Number], degree: int) -> "FormalPowerSeries":
        return cls([m.get(i, 0) for i in range(degree + 1)], degree)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def _check(self, other: "FormalPowerSeries") -> None:
        if other.degree != self.degree:
            raise ValueError(f"truncation mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "FormalPowerSeries") -> "FormalPowerSeries":
        self._check(other)
        return FormalPowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.degree)

    def __sub__(self, other: "FormalPowerSeries") -> "FormalPowerSeries":
        self._check(other)
        return FormalPowerSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.degree)

    def __neg__(self) -> "FormalPowerSeries":
        return FormalPowerSeries([-a for a in self.coeffs], self.degree)

    def __mul__(self, other: "FormalPowerSeries") -> "FormalPowerSeries":
        self._check(other)
        n = self.degree
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return FormalPowerSeries(out, n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalPowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs))

    def reciprocal(self) -> "FormalPowerSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        n = self.degree
        out = [Fraction(0)] * (n + 1)
        out[0] = 1 / c0
        for k in range(1, n + 1):
            s = sum(self.coeffs[i] * out[k - i] for i in range(1, k + 1))
            out[k] = -s / c0
        return FormalPowerSeries(out, n)

    def exp(self) -> "FormalPowerSeries":
        """exp of a series with zero constant term, via ``k e_k = sum_i i a_i e_(k-i)``."""
        if self.coeffs[0] != 0:
            raise ValueError("exp needs zero constant term")
        n = self.degree
        e = [Fraction(0)] * (n + 1)
        e[0] = Fraction(1)
        for k in range(1, n + 1):
            e[k] = sum(i * self.coeffs[i] * e[k - i] for i in range(1, k + 1)) / k
        return FormalPowerSeries(e, n)

    def log(self) -> "FormalPowerSeries":
        if self.coeffs[0] != 1:
            raise ValueError("log needs constant term 1")
        n = self.degree
        f = self.coeffs
        out = [Fraction(0)] * (n + 1)
        # F' = L' F, so k f_k = sum_{i=1..k} i l_i f_{k-i}
        for k in range(1, n + 1):
            s = k * f[k] - sum(i * out[i] * f[k - i] for i in range(1, k))
            out[k] = s / k
        return FormalPowerSeries(out, n)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> List[int]:
        if not self.is_integral():
            raise ValueError(f"non-integral series {self}")
        return [int(c) for c in self.coeffs]

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            cs = str(c)
            if i == 0:
                terms.append(cs)
            elif i == 1:
                terms.append(f"{cs} z")
            else:
                terms.append(f"{cs} z^{i}")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"FormalPowerSeries({[str(c) for c in self.coeffs]}, degree={self.degree})"


def product(series: Sequence[FormalPowerSeries], degree: int) -> FormalPowerSeries:
    out = FormalPowerSeries.one(degree)
    for s in series:
        out = out * s
    return out
