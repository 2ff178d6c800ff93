"""Truncated bosonic Fock space F^{≤N} over M modes.

States are occupation vectors (n_1, ..., n_M) with Σn_i ≤ n_max, ordered by
total particle number and, within a sector, lexicographically with the
first mode running from high to low occupation. Every sector n ≤ n_max is
therefore a contiguous block and F^{≤n} is a prefix of F^{≤n_max}.

Operators are scipy sparse matrices in this basis. The creation operator
a*_i drops the top sector (truncation), so the canonical commutation
relations hold only below it. The modified fields b_i = √((N−𝒩)/N) a_i,
b*_i = a*_i √((N−𝒩)/N) leave F^{≤N} invariant and need no such caveat.
Monomials that pass through F^{N+1} in the middle (Π-operators) are
assembled on the basis with one extra sector and then compressed.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, factorial, sqrt
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from src.core.errors import ConsistencyError, DomainError, ResourceError
from src.core.settings import get_settings
from src.models.schemas import PiKind, QuadraticKind, Symmetry

logger = logging.getLogger("gp_fluctuations")

CREATE = "*"
ANNIHILATE = "."


def _compositions(n: int, m: int):
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


class FockBasis:
    """Occupation-number basis of F^{≤n_max} over ``modes`` modes."""

    def __init__(self, modes: int, n_max: int):
        if modes < 1:
            raise DomainError(f"need at least one mode, got {modes}", parameter="modes")
        if n_max < 0:
            raise DomainError(f"n_max must be nonnegative, got {n_max}", parameter="n_max")
        dimension = comb(n_max + modes, modes)
        cap = get_settings().dimension_cap
        if dimension > cap:
            raise ResourceError("Fock space dimension", dimension, cap)

        self.modes = modes
        self.n_max = n_max
        states = [s for n in range(n_max + 1) for s in _compositions(n, modes)]
        self.occupations = np.array(states, dtype=int).reshape(len(states), modes)
        self.totals = self.occupations.sum(axis=1)
        self._index = {s: i for i, s in enumerate(states)}
        self._offsets = np.searchsorted(self.totals, np.arange(n_max + 2))
        self._creation: dict[int, sp.csr_matrix] = {}

    @property
    def dimension(self) -> int:
        return len(self.occupations)

    def __len__(self) -> int:
        return self.dimension

    def __repr__(self) -> str:
        return f"FockBasis(modes={self.modes}, n_max={self.n_max}, dimension={self.dimension})"

    def index(self, occupation: Sequence[int]) -> int:
        try:
            return self._index[tuple(occupation)]
        except KeyError:
            raise DomainError(f"occupation {tuple(occupation)} is not in the basis", parameter="occupation") from None

    def state(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.occupations[i])

    def sector(self, n: int) -> slice:
        """Index range of the n-particle sector."""
        if not 0 <= n <= self.n_max:
            raise DomainError(f"sector {n} outside 0..{self.n_max}", parameter="n")
        return slice(int(self._offsets[n]), int(self._offsets[n + 1]))

    def prefix(self, n: int) -> int:
        """Dimension of F^{≤n}, the leading block of this basis."""
        return int(self._offsets[min(n, self.n_max) + 1])

    def weight(self, fn) -> sp.csr_matrix:
        """Diagonal operator g(𝒩)."""
        return sp.diags(np.asarray(fn(self.totals.astype(float)), dtype=complex)).tocsr()

    def creation_mode(self, i: int) -> sp.csr_matrix:
        if i not in self._creation:
            rows, cols, vals = [], [], []
            for col, occ in enumerate(self.occupations):
                if self.totals[col] == self.n_max:
                    continue
                target = list(occ)
                target[i] += 1
                rows.append(self._index[tuple(target)])
                cols.append(col)
                vals.append(sqrt(occ[i] + 1))
            d = self.dimension
            self._creation[i] = sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=(d, d))
        return self._creation[i]

    def annihilation_mode(self, i: int) -> sp.csr_matrix:
        return self.creation_mode(i).conj().T.tocsr()

    def field_mode(self, i: int, kind: str) -> sp.csr_matrix:
        _check_chars(kind)
        return self.creation_mode(i) if kind == CREATE else self.annihilation_mode(i)

    def vacuum(self) -> "FockVector":
        coefficients = np.zeros(self.dimension, dtype=complex)
        coefficients[0] = 1.0
        return FockVector(coefficients, self)


def enumerate_basis(modes: int, n_max: int) -> FockBasis:
    basis = FockBasis(modes, n_max)
    logger.debug("Fock basis M=%d N_max=%d dimension=%d", modes, n_max, basis.dimension)
    return basis


@dataclass
class FockVector:
    coefficients: np.ndarray
    basis: FockBasis

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (self.basis.dimension,):
            raise DomainError(
                f"vector length {self.coefficients.shape} does not match dimension {self.basis.dimension}",
                parameter="coefficients",
            )
        if not np.all(np.isfinite(self.coefficients)):
            raise DomainError("vector coefficients must be finite", parameter="coefficients")

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def sector(self, n: int) -> np.ndarray:
        return self.coefficients[self.basis.sector(n)]

    def sector_norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(self.sector(n)) for n in range(self.basis.n_max + 1)])

    def normalized(self) -> "FockVector":
        return FockVector(self.coefficients / self.norm, self.basis)

    def expectation(self, operator: "FockOperator") -> complex:
        return complex(np.vdot(self.coefficients, operator.matrix @ self.coefficients))


def _symmetry_defect(m, symmetry: Symmetry) -> float:
    if symmetry == Symmetry.HERMITIAN:
        diff = m - m.conj().T
    elif symmetry == Symmetry.ANTIHERMITIAN:
        diff = m + m.conj().T
    elif symmetry == Symmetry.UNITARY:
        diff = m.conj().T @ m - sp.identity(m.shape[0], format="csr")
    else:
        return 0.0
    diff = abs(diff)
    return float(diff.max()) if diff.shape[0] else 0.0


@dataclass
class FockOperator:
    """Matrix over a FockBasis with a verified symmetry tag."""
    matrix: object
    basis: FockBasis
    symmetry: Symmetry = Symmetry.NONE
    label: str = field(default="", compare=False)

    def __post_init__(self):
        d = self.basis.dimension
        if self.matrix.shape != (d, d):
            raise DomainError(f"matrix shape {self.matrix.shape} does not match dimension {d}", parameter="matrix")
        if self.symmetry != Symmetry.NONE:
            defect = _symmetry_defect(self.matrix, self.symmetry)
            scale = max(1.0, float(abs(self.matrix).max())) if d else 1.0
            tol = 1e-10 if self.symmetry == Symmetry.UNITARY else 1e-12 * scale
            if defect > tol:
                raise ConsistencyError(f"{self.label or 'operator'} is not {self.symmetry.value} (defect {defect:.2e})")

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, self.basis, self.symmetry, label=f"{self.label}†")

    def apply(self, vector: FockVector) -> FockVector:
        return FockVector(self.matrix @ vector.coefficients, self.basis)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix, self.basis)
        if isinstance(other, FockVector):
            return self.apply(other)
        return self.matrix @ other

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix + other.matrix, self.basis)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix - other.matrix, self.basis)

    def __mul__(self, scalar: complex) -> "FockOperator":
        return FockOperator(self.matrix * scalar, self.basis)

    __rmul__ = __mul__


def _coefficients(f, basis: FockBasis) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (basis.modes,):
        raise DomainError(f"mode coefficients have shape {f.shape}, expected ({basis.modes},)", parameter="f")
    if not np.all(np.isfinite(f)):
        raise DomainError("mode coefficients must be finite", parameter="f")
    return f


def _combine(basis: FockBasis, weights: np.ndarray, kind: str) -> sp.csr_matrix:
    """Σ_i weights_i F_i with F_i = a*_i or a_i."""
    out = sp.csr_matrix((basis.dimension, basis.dimension), dtype=complex)
    for i, w in enumerate(weights):
        if w != 0:
            out = out + w * basis.field_mode(i, kind)
    return out


def creation(f, basis: FockBasis) -> FockOperator:
    """a*(f) = Σ f_i a*_i, linear in f."""
    return FockOperator(_combine(basis, _coefficients(f, basis), CREATE), basis, label="a*(f)")


def annihilation(f, basis: FockBasis) -> FockOperator:
    """a(f) = Σ f̄_i a_i, antilinear in f."""
    return FockOperator(_combine(basis, _coefficients(f, basis).conj(), ANNIHILATE), basis, label="a(f)")


def number_operator(basis: FockBasis) -> FockOperator:
    return FockOperator(basis.weight(lambda n: n), basis, Symmetry.HERMITIAN, label="N")


def d_gamma(b: np.ndarray, basis: FockBasis) -> FockOperator:
    """dΓ(B) = Σ_ij B_ij a*_i a_j."""
    b = np.asarray(b, dtype=complex)
    if b.shape != (basis.modes, basis.modes):
        raise DomainError(f"one-particle matrix has shape {b.shape}", parameter="B")
    out = sp.csr_matrix((basis.dimension, basis.dimension), dtype=complex)
    for j in range(basis.modes):
        column = _combine(basis, b[:, j], CREATE)
        if column.nnz:
            out = out + column @ basis.annihilation_mode(j)
    tag = Symmetry.HERMITIAN if np.allclose(b, b.conj().T, atol=1e-14) else Symmetry.NONE
    return FockOperator(out.tocsr(), basis, tag, label="dGamma")


def _total(matrices: list) -> sp.csr_matrix:
    out = matrices[0]
    for m in matrices[1:]:
        out = out + m
    return out


def _b_weight(basis: FockBasis, n: int) -> sp.csr_matrix:
    return basis.weight(lambda k: np.sqrt(np.maximum(n - k, 0.0) / n))


def _b_combination(basis: FockBasis, weights: np.ndarray, kind: str, n: int) -> sp.csr_matrix:
    d = _b_weight(basis, n)
    combo = _combine(basis, weights, kind)
    return (combo @ d if kind == CREATE else d @ combo).tocsr()


def _require_closed(basis: FockBasis, n: int) -> None:
    if n != basis.n_max:
        raise DomainError(f"b-fields need N = n_max, got N={n}, n_max={basis.n_max}", parameter="N")


def b_field(f, basis: FockBasis, n: int) -> FockOperator:
    """b(f) = √((N−𝒩)/N) a(f) on F^{≤N}."""
    _require_closed(basis, n)
    return FockOperator(_b_combination(basis, _coefficients(f, basis).conj(), ANNIHILATE, n), basis, label="b(f)")


def b_dagger_field(f, basis: FockBasis, n: int) -> FockOperator:
    """b*(f) = a*(f) √((N−𝒩)/N) on F^{≤N}."""
    _require_closed(basis, n)
    return FockOperator(_b_combination(basis, _coefficients(f, basis), CREATE, n), basis, label="b*(f)")


def _check_chars(pattern: str) -> None:
    if not pattern or any(c not in (CREATE, ANNIHILATE) for c in pattern):
        raise DomainError(f"pattern {pattern!r} may only contain '*' and '.'", parameter="pattern")


def _kernel(j, basis: FockBasis) -> np.ndarray:
    j = np.asarray(j, dtype=complex)
    if j.shape != (basis.modes, basis.modes):
        raise DomainError(f"kernel has shape {j.shape}, expected ({basis.modes}, {basis.modes})", parameter="J")
    return j


def quadratic_field(kind: QuadraticKind, pattern: str, j, basis: FockBasis, n: Optional[int] = None) -> FockOperator:
    """A_{♯1♯2}(J) or B_{♯1♯2}(J) = Σ_xy J^{♯̄1}(x;y) F^{♯1}_y F^{♯2}_x.

    J^{♯̄1} is J when ♯1 = '*' and J̄ when ♯1 = '.'. The A kind uses the
    truncated a-fields of ``basis`` as they are; the B kind needs N = n_max.
    """
    _check_chars(pattern)
    if len(pattern) != 2:
        raise DomainError(f"quadratic pattern must have two symbols, got {pattern!r}", parameter="pattern")
    j = _kernel(j, basis)
    first, second = pattern
    weights = j if first == CREATE else j.conj()
    if kind == QuadraticKind.B:
        n = basis.n_max if n is None else n
        _require_closed(basis, n)

        def fields(w, c):
            return _b_combination(basis, w, c, n)
    else:
        def fields(w, c):
            return _combine(basis, w, c)

    out = sp.csr_matrix((basis.dimension, basis.dimension), dtype=complex)
    for x in range(basis.modes):
        unit = np.zeros(basis.modes)
        unit[x] = 1.0
        # F^{♯2}_x is the field of the unit vector e_x; its coefficients are real
        out = out + fields(weights[x], first) @ fields(unit, second)
    return FockOperator(out.tocsr(), basis, label=f"{kind.value}_{pattern}")


def k_factor(j: np.ndarray, left: str, right: str) -> float:
    """‖J‖₂, plus Σ|J(x;x)| when the pair (left, right) = ('.', '*') is not normally ordered."""
    value = float(np.linalg.norm(j))
    if left == ANNIHILATE and right == CREATE:
        value += float(np.sum(np.abs(np.diag(j))))
    return value


def _validate_pi(kind: PiKind, kernels, sharps: str, flats: str, f) -> None:
    n = len(kernels)
    if kind == PiKind.PI2:
        if n < 1 or len(sharps) != n or len(flats) != n:
            raise DomainError(f"Π² of order {n} needs {n} sharps and {n} flats", parameter="patterns")
        pairs = [(sharps[l - 1], flats[l]) for l in range(1, n)]
    elif kind == PiKind.PI1:
        if len(sharps) != n or len(flats) != n + 1:
            raise DomainError(f"Π¹ of order {n} needs {n} sharps and {n + 1} flats", parameter="patterns")
        pairs = [(sharps[l - 1], flats[l]) for l in range(1, n + 1)]
    else:
        if len(sharps) != n or len(flats) != n + 1 or n < 1:
            raise DomainError(f"Π̃¹ of order {n} needs {n} sharps and {n + 1} flats", parameter="patterns")
        pairs = [(sharps[l], flats[l]) for l in range(n)]
    for s in (sharps, flats):
        if s:
            _check_chars(s)
    for l, (s, b) in enumerate(pairs):
        if s == b:
            raise DomainError(f"pair {l} is {s}{b}; interior pairs must be '.*' or '*.'", parameter="patterns")
    if kind != PiKind.PI2 and f is None:
        raise DomainError(f"{kind.value} needs a one-particle function f", parameter="f")


def pi_operator(
    kind: PiKind,
    kernels: Sequence[np.ndarray],
    sharps: str,
    flats: str,
    basis: FockBasis,
    n: int,
    f: Optional[np.ndarray] = None,
) -> FockOperator:
    """Π², Π¹ or Π̃¹ monomial with mode sums in place of the integrals.

    ``sharps`` and ``flats`` list ♯ and ♭ in their natural index order
    (♯₁..♯ₙ and ♭₀..♭ₙ₋₁ for Π², ♭₀..♭ₙ for Π¹, ♯₀..♯ₙ₋₁ and ♭₀..♭ₙ for Π̃¹).
    """
    _require_closed(basis, n)
    kernels = [_kernel(j, basis) for j in kernels]
    _validate_pi(kind, kernels, sharps, flats, f)
    order = len(kernels)
    f = None if f is None else _coefficients(f, basis)
    big = enumerate_basis(basis.modes, n + 1)
    m = basis.modes

    def a(weights, c):
        return _combine(big, weights, c)

    def b(weights, c):
        return _b_combination(big, weights, c, n)

    def a_of_f(c):
        return a(f if c == CREATE else f.conj(), c)

    eye = np.eye(m)

    if kind == PiKind.PI1 and order == 0:
        matrix = b(f if flats[0] == CREATE else f.conj(), flats[0])
    elif kind in (PiKind.PI1, PiKind.PI2):
        if kind == PiKind.PI2:
            tail = [b(kernels[-1][x], sharps[-1]) for x in range(m)]
        else:
            af = a_of_f(flats[order])
            tail = [a(kernels[-1][x], sharps[-1]) @ af for x in range(m)]
        for l in range(order - 1, 0, -1):
            inner = _total([a(eye[x], flats[l]) @ tail[x] for x in range(m)])
            tail = [a(kernels[l - 1][x], sharps[l - 1]) @ inner for x in range(m)]
        matrix = _total([b(eye[x], flats[0]) @ tail[x] for x in range(m)])
    else:
        tail = [b(kernels[-1][x], flats[order]) for x in range(m)]
        for l in range(order - 1, 0, -1):
            inner = _total([a(eye[x], sharps[l]) @ tail[x] for x in range(m)])
            tail = [a(kernels[l - 1][x], flats[l]) @ inner for x in range(m)]
        matrix = a_of_f(flats[0]) @ _total([a(eye[x], sharps[0]) @ tail[x] for x in range(m)])

    d = basis.dimension
    compressed = sp.csr_matrix(matrix)[:d, :d]
    return FockOperator(compressed.tocsr(), basis, label=f"{kind.value}[{sharps}|{flats}]")


def pi_adjoint_patterns(sharps: str, flats: str) -> tuple[str, str]:
    """Patterns of Π̃¹ equal to the adjoint of Π¹(♯, ♭): reversed and flipped."""
    flip = {CREATE: ANNIHILATE, ANNIHILATE: CREATE}
    return "".join(flip[c] for c in reversed(sharps)), "".join(flip[c] for c in reversed(flats))


def pi_k_factors(kind: PiKind, kernels, sharps: str, flats: str) -> list[float]:
    if kind == PiKind.PI1_TILDE:
        raise DomainError("K-factors are defined for Π¹ and Π² only", parameter="kind")
    return [k_factor(np.asarray(j), flats[l - 1], sharps[l - 1]) for l, j in enumerate(kernels, start=1)]


def pi_vector_bound(kind: PiKind, kernels, sharps: str, flats: str, vector: np.ndarray, basis: FockBasis,
                    n: int, f: Optional[np.ndarray] = None) -> float:
    """Right-hand side of the vector bound for ‖Π ξ‖."""
    order = len(kernels)
    prefactor = 6.0**order * float(np.prod(pi_k_factors(kind, kernels, sharps, flats)))
    totals = basis.totals.astype(float)
    shift = 1.0 - (totals - 2.0) / n
    if kind == PiKind.PI2:
        weighted = (totals + 1) ** order * shift * vector
    else:
        prefactor *= float(np.linalg.norm(f))
        weighted = (totals + 1) ** (order + 0.5) * np.sqrt(shift) * vector
    return prefactor * float(np.linalg.norm(weighted))


def pi_norm_bound(kind: PiKind, kernels, sharps: str, flats: str, n: int, f: Optional[np.ndarray] = None) -> float:
    order = len(kernels)
    bound = (12.0 * n) ** order * float(np.prod(pi_k_factors(kind, kernels, sharps, flats)))
    if kind == PiKind.PI1:
        bound *= sqrt(n) * float(np.linalg.norm(f))
    return bound


def quadratic_vector_bound(kind: QuadraticKind, pattern: str, j: np.ndarray, vector: np.ndarray,
                           basis: FockBasis, n: Optional[int] = None) -> float:
    """√2·K·‖(𝒩+1)ξ‖ for A, √2·K·‖(𝒩+1)(N−𝒩+2)/N ξ‖ for B."""
    k = k_factor(j, pattern[0], pattern[1])
    totals = basis.totals.astype(float)
    weight = totals + 1
    if kind == QuadraticKind.B:
        n = basis.n_max if n is None else n
        weight = weight * (n - totals + 2) / n
    return sqrt(2) * k * float(np.linalg.norm(weight * vector))


def b_vector_bounds(f: np.ndarray, vector: np.ndarray, basis: FockBasis, n: int) -> tuple[float, float]:
    """Bounds on ‖b(f)ξ‖ and ‖b*(f)ξ‖ through 𝒩."""
    totals = basis.totals.astype(float)
    fn = float(np.linalg.norm(f))
    lower = fn * float(np.linalg.norm(np.sqrt(totals * (n - totals + 1) / n) * vector))
    upper = fn * float(np.linalg.norm(np.sqrt((totals + 1) * (n - totals) / n) * vector))
    return lower, upper


def random_vector(basis: FockBasis, rng: np.random.Generator, max_sector: Optional[int] = None) -> np.ndarray:
    """Normalized complex Gaussian vector supported on sectors ≤ max_sector."""
    size = basis.prefix(basis.n_max if max_sector is None else max_sector)
    v = np.zeros(basis.dimension, dtype=complex)
    v[:size] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return v / np.linalg.norm(v)


def random_kernel(modes: int, rng: np.random.Generator, symmetric: bool = False) -> np.ndarray:
    j = rng.standard_normal((modes, modes)) + 1j * rng.standard_normal((modes, modes))
    if symmetric:
        j = 0.5 * (j + j.T)
    return j / np.linalg.norm(j)


def creation_power_state(f: np.ndarray, power: int, basis: FockBasis) -> np.ndarray:
    """a*(f)^k/√k! Ω."""
    op = creation(f, basis).matrix
    v = basis.vacuum().coefficients
    for _ in range(power):
        v = op @ v
    return v / sqrt(factorial(power))
