"""Beltrami fields on a flat torus and the modulus paths they generate.

Fields live on the lattice-coordinate grid: the point ``(s, t)`` in
``[0,1)^2`` is ``z = s + t tau``, and an ``N x N`` field samples
``mu(s, t)`` at ``(j/N, k/N)``.  Derivatives in ``z`` and ``zbar`` are
spectral: in lattice coordinates the mode ``exp(2 pi i (j s + k t))`` is
an eigenfunction of both, with eigenvalues

    d/dz    ->  pi (k - conj(tau) j) / Im tau
    d/dzbar ->  pi (tau j - k) / Im tau

so differentiation is exact for band-limited fields.  The Nyquist row
and column carry no usable phase information on a real grid and are
dropped by the derivative operators.

A constant field ``m`` deforms the torus through an explicit family of
affine stretches: ``z -> z + t m zbar`` sends the lattice ``Z + tau Z``
to a lattice of modulus ``(tau + t m conj(tau)) / (1 + t m)``.  Running
that path at speed ``tanh`` traces the unit-speed extremal stretch line
when ``|m| = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .harmonic import HopfDifferential
from .moduli import Modulus, format_complex, parse_complex

__all__ = [
    "BeltramiField",
    "constant",
    "from_function",
    "catalog_field",
    "field_from_spec",
    "FIELD_CATALOG",
    "lattice_grid",
    "dz_multiplier",
    "dzbar_multiplier",
    "grid_dz",
    "grid_dzbar",
    "modulus_path_constant",
    "teich_geodesic_constant",
    "pair_hopf",
]


def _require_grid_size(n: int) -> None:
    if n < 4 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 4, got {n}")


def lattice_grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate arrays ``S[j, k] = j/n`` and ``T[j, k] = k/n``."""
    _require_grid_size(n)
    coords = np.arange(n) / n
    return np.meshgrid(coords, coords, indexing="ij")


def _frequencies(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def _zero_nyquist(mult: np.ndarray) -> np.ndarray:
    n = mult.shape[0]
    if n % 2 == 0:
        mult[n // 2, :] = 0.0
        mult[:, n // 2] = 0.0
    return mult


def dz_multiplier(tau: Modulus, n: int) -> np.ndarray:
    """Fourier symbol of ``d/dz`` on the ``n x n`` lattice grid."""
    j = _frequencies(n)[:, None]
    k = _frequencies(n)[None, :]
    return _zero_nyquist(np.pi * (k - tau.value.conjugate() * j) / tau.im)


def dzbar_multiplier(tau: Modulus, n: int) -> np.ndarray:
    """Fourier symbol of ``d/dzbar`` on the ``n x n`` lattice grid."""
    j = _frequencies(n)[:, None]
    k = _frequencies(n)[None, :]
    return _zero_nyquist(np.pi * (tau.value * j - k) / tau.im)


def grid_dz(samples: np.ndarray, tau: Modulus) -> np.ndarray:
    return np.fft.ifft2(dz_multiplier(tau, samples.shape[0]) * np.fft.fft2(samples))

def grid_dzbar(samples: np.ndarray, tau: Modulus) -> np.ndarray:
    return np.fft.ifft2(dzbar_multiplier(tau, samples.shape[0]) * np.fft.fft2(samples))


@dataclass(frozen=True, eq=False)
class BeltramiField:
    """A complex field on the torus of modulus ``tau``.

    Either ``value`` is set (spatially constant field, ``n == 1``) or
    ``samples`` is an ``n x n`` complex grid in lattice coordinates.
    Constant fields answer every query in closed form and are the only
    harmonic ones constructed here.
    """

    tau: Modulus
    n: int
    samples: np.ndarray | None = None
    value: complex | None = None

    def __post_init__(self) -> None:
        if (self.samples is None) == (self.value is None):
            raise ValueError("exactly one of samples/value must be given")
        if self.value is not None:
            if self.n != 1:
                raise ValueError("constant fields use n = 1")
            if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
                raise ValueError("field value must be finite")
        else:
            _require_grid_size(self.n)
            arr = np.ascontiguousarray(self.samples, dtype=complex)
            if arr.shape != (self.n, self.n):
                raise ValueError(f"samples must be {self.n} x {self.n}")
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError("field samples must be finite")
            arr.flags.writeable = False
            object.__setattr__(self, "samples", arr)

    @property
    def is_constant(self) -> bool:
        return self.value is not None

    @property
    def is_harmonic(self) -> bool:
        return self.is_constant

    def mean(self) -> complex:
        if self.is_constant:
            return self.value
        return complex(self.samples.mean())

    def sup_norm(self) -> float:
        if self.is_constant:
            return abs(self.value)
        return float(np.abs(self.samples).max())

    def l2_mean_square(self) -> float:
        """Grid mean of ``|mu|^2``."""
        if self.is_constant:
            return abs(self.value) ** 2
        return float(np.mean(np.abs(self.samples) ** 2))

    def dzbar(self) -> "BeltramiField":
        """Spectral ``d mu / d zbar``, exact for band-limited samples."""
        if self.is_constant:
            return BeltramiField(self.tau, 1, value=0j)
        return BeltramiField(self.tau, self.n, samples=grid_dzbar(self.samples, self.tau))

    def scaled(self, factor: complex) -> "BeltramiField":
        if self.is_constant:
            return BeltramiField(self.tau, 1, value=self.value * factor)
        return BeltramiField(self.tau, self.n, samples=self.samples * factor)

    def grid_samples(self, n: int) -> np.ndarray:
        """Materialize the field on an ``n x n`` grid, ``n >= self.n``.

        Grid fields are resampled by trigonometric interpolation, which
        reproduces band-limited fields exactly.
        """
        _require_grid_size(n)
        if self.is_constant:
            return np.full((n, n), complex(self.value))
        if n == self.n:
            return self.samples
        if n < self.n:
            raise ValueError("cannot resample below the native resolution")
        spec = np.fft.fft2(self.samples) / self.n**2
        idx = _frequencies(self.n).astype(int) % n
        out = np.zeros((n, n), dtype=complex)
        out[np.ix_(idx, idx)] = spec
        return np.fft.ifft2(out) * n**2

    def to_json(self) -> dict:
        data = {"tau": format_complex(self.tau.value), "N": self.n}
        if self.is_constant:
            data["constant"] = format_complex(self.value)
        else:
            flat = self.samples.ravel()
            data["samples"] = [[v.real, v.imag] for v in flat]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "BeltramiField":
        tau = Modulus.from_complex(parse_complex(data["tau"]))
        n = int(data["N"])
        if "constant" in data:
            return cls(tau, 1, value=parse_complex(data["constant"]))
        flat = np.array([complex(re, im) for re, im in data["samples"]])
        return cls(tau, n, samples=flat.reshape(n, n))


def constant(tau: Modulus, m: complex) -> BeltramiField:
    return BeltramiField(tau, 1, value=complex(m))


def from_function(
    tau: Modulus, n: int, f: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> BeltramiField:
    """Sample ``f(s, t)`` on the ``n x n`` lattice grid; ``f`` must broadcast."""
    s, t = lattice_grid(n)
    return BeltramiField(tau, n, samples=np.asarray(f(s, t), dtype=complex))


_TWO_PI = 2.0 * np.pi

#: Named test fields, all mean-zero and band-limited with modes well
#: below the Nyquist frequency of every supported grid.
FIELD_CATALOG: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "cos2pis": lambda s, t: np.cos(_TWO_PI * s) + 0j,
    "sin2pis": lambda s, t: np.sin(_TWO_PI * s) + 0j,
    "exp2pis": lambda s, t: np.exp(2j * np.pi * s),
    "icos2pis": lambda s, t: 1j * np.cos(_TWO_PI * s),
    "cos2pit": lambda s, t: np.cos(_TWO_PI * t) + 0j,
    "sin2pit": lambda s, t: np.sin(_TWO_PI * t) + 0j,
    "exp2pit": lambda s, t: np.exp(2j * np.pi * t),
    "coscos": lambda s, t: np.cos(_TWO_PI * s) * np.cos(_TWO_PI * t) + 0j,
    "sinsin": lambda s, t: np.sin(_TWO_PI * s) * np.sin(_TWO_PI * t) + 0j,
    "exp2pist": lambda s, t: np.exp(2j * np.pi * (s + t)),
}


def catalog_field(tau: Modulus, name: str, n: int) -> BeltramiField:
    try:
        f = FIELD_CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown field {name!r}; available: {', '.join(sorted(FIELD_CATALOG))}"
        ) from None
    return from_function(tau, n, f)


def field_from_spec(tau: Modulus, spec: dict) -> BeltramiField:
    """Build a field from the scenario form {"constant": "a+bi"} or
    {"function": name, "N": n}."""
    if "constant" in spec:
        return constant(tau, parse_complex(spec["constant"]))
    if "function" in spec:
        return catalog_field(tau, spec["function"], int(spec.get("N", 64)))
    raise ValueError("field spec needs a 'constant' or 'function' key")


def modulus_path_constant(tau: Modulus, m: complex, t: float) -> Modulus:
    """Modulus of the image of ``Z + tau Z`` under ``z -> z + t m zbar``.

    Requires ``|t m| < 1`` so the stretch is a homeomorphism.  The image
    lattice is spanned by ``1 + t m`` and ``tau + t m conj(tau)``; after
    renormalizing the first vector to ``1`` the modulus is their ratio.
    With ``m = 0`` the path is constant at ``tau`` for every ``t``.
    """
    if abs(t * m) >= 1.0:
        raise ValueError("path parameter must satisfy |t m| < 1")
    w = (tau.value + t * m * tau.value.conjugate()) / (1.0 + t * m)
    if w.imag <= 0.0:
        raise ValueError("path left the upper half-plane")
    return Modulus.from_complex(w)


def teich_geodesic_constant(tau: Modulus, m: complex, t: float) -> Modulus:
    """Point at arc-length parameter ``t`` on the stretch line through ``tau``.

    ``m`` must be unimodular; the line is the constant-field path
    reparametrized by ``tanh`` so that ``t`` is the flat distance of the
    quasiconformal stretch, with dilatation ``exp(2|t|)``.
    """
    if abs(abs(m) - 1.0) > 1e-12:
        raise ValueError("geodesic direction must have |m| = 1")
    return modulus_path_constant(tau, m, math.tanh(t))


def pair_hopf(field: BeltramiField, phi: HopfDifferential, tau: Modulus) -> complex:
    """Pairing ``<mu, phi>`` with the measure normalized to mass ``4 Im tau``.

    Constant fields pair through their value; grid fields through their
    grid mean, which is the exact pairing for the constant part and the
    trapezoid-exact one for band-limited remainders (they integrate to
    zero).  The field must live on the torus being paired.
    """
    if field.tau != tau:
        raise ValueError("field and differential live on different tori")
    return 4.0 * tau.im * field.mean() * phi.coeff
