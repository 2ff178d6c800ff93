"""Real trigonometric one-particle modes on a periodic box.

The modes are the constant function followed by √2·cos(k·x) and
√2·sin(k·x) (normalized by the box volume) for wavevectors of increasing
|k|. They are real, so complex conjugation of a one-particle function is
plain conjugation of its mode coefficients. Each mode is a fixed unitary
combination of plane waves, which keeps the kinetic matrix diagonal and
lets pair interactions be written through momentum conservation.
"""

import itertools
from typing import Callable, Optional

import numpy as np

from src.core import grids
from src.core.errors import DomainError
from src.models.results import ModeBasis
from src.models.schemas import SpatialGrid


def _representatives(dimension: int, count: int) -> list[tuple[int, ...]]:
    """Integer vectors n ≠ 0, one per ±n pair, by |n|² then lexicographically."""
    reach = 1
    while True:
        candidates = []
        for n in itertools.product(range(-reach, reach + 1), repeat=dimension):
            if any(n) and next(c for c in n if c != 0) > 0:
                candidates.append(n)
        candidates.sort(key=lambda n: (sum(c * c for c in n), tuple(-c for c in n)))
        # everything with |n|² ≤ reach² is present once the box reaches that far
        complete = [n for n in candidates if sum(c * c for c in n) <= reach**2]
        if 2 * len(complete) + 1 >= count:
            return complete
        reach += 1


def trig_modes(m: int, grid: Optional[SpatialGrid] = None, dimension: int = 1,
               length: float = 2 * np.pi) -> ModeBasis:
    """First ``m`` real trigonometric modes, embedded on ``grid`` when given."""
    if m < 1:
        raise DomainError(f"need at least one mode, got {m}", parameter="modes")
    if grid is not None:
        dimension, length = grid.dimension, grid.length
    reps = _representatives(dimension, m)

    labels = ["const"]
    momenta = [tuple([0] * dimension)]
    for n in reps:
        momenta.extend([n, tuple(-c for c in n)])
    momenta_arr = np.array(momenta, dtype=float)
    index = {p: i for i, p in enumerate(momenta)}

    transform = np.zeros((m, len(momenta)), dtype=complex)
    transform[0, 0] = 1.0
    row = 1
    for n in reps:
        if row >= m:
            break
        plus, minus = index[n], index[tuple(-c for c in n)]
        transform[row, plus] = transform[row, minus] = 1 / np.sqrt(2)
        labels.append(f"cos{n}")
        row += 1
        if row >= m:
            break
        transform[row, plus] = -1j / np.sqrt(2)
        transform[row, minus] = 1j / np.sqrt(2)
        labels.append(f"sin{n}")
        row += 1

    # drop plane waves no mode uses
    used = np.flatnonzero(np.any(np.abs(transform) > 0, axis=0))
    transform = transform[:, used]
    wavevectors = 2 * np.pi * momenta_arr[used] / length
    kinetic = np.array([np.sum(wavevectors[np.argmax(np.abs(t) > 0)] ** 2) for t in transform])

    basis = ModeBasis(
        labels=labels, momenta=wavevectors, transform=transform, kinetic=kinetic,
        length=length, dimension=dimension, grid=grid,
    )
    if grid is not None:
        basis.embedding = _embed(basis, grid)
    return basis


def _embed(basis: ModeBasis, grid: SpatialGrid) -> np.ndarray:
    coords = grids.coordinates(grid)
    volume = basis.length**basis.dimension
    waves = np.array([
        np.exp(1j * sum(k[i] * coords[i] for i in range(basis.dimension))) for k in basis.momenta
    ]) / np.sqrt(volume)
    fields = np.tensordot(basis.transform, waves, axes=1)
    return fields.real


def gram(basis: ModeBasis) -> np.ndarray:
    """⟨e_i, e_j⟩ from the embedded modes."""
    if basis.embedding is None:
        return basis.transform.conj() @ basis.transform.T
    flat = basis.embedding.reshape(basis.m, -1)
    return flat.conj() @ flat.T * grids.cell_volume(basis.grid)


def project(basis: ModeBasis, psi: np.ndarray) -> np.ndarray:
    """Mode coefficients ⟨e_j, ψ⟩."""
    _require_embedding(basis, psi.shape)
    flat = basis.embedding.reshape(basis.m, -1)
    return flat.conj() @ psi.reshape(-1) * grids.cell_volume(basis.grid)


def lift(basis: ModeBasis, coefficients: np.ndarray) -> np.ndarray:
    """Σ_j c_j e_j on the grid."""
    _require_embedding(basis)
    return np.tensordot(np.asarray(coefficients), basis.embedding, axes=1)


def _require_embedding(basis: ModeBasis, shape: Optional[tuple] = None) -> None:
    if basis.embedding is None or basis.grid is None:
        raise DomainError("mode basis has no grid embedding", parameter="modes")
    if shape is not None and shape != basis.embedding.shape[1:]:
        raise DomainError(f"field shape {shape} does not match the mode grid", parameter="grid")


def plane_wave_tensor(basis: ModeBasis, transform: Callable, transverse_area: float = 1.0) -> np.ndarray:
    """(1/L^d)·δ(k_a+k_b = k_c+k_d)·K̂(k_a−k_c) over the basis plane waves."""
    k = basis.momenta
    p = len(k)
    diff = np.linalg.norm(k[:, None, :] - k[None, :, :], axis=-1)
    khat = np.asarray(transform(diff.reshape(-1)), dtype=float).reshape(p, p)
    if basis.dimension == 1:
        khat = khat / transverse_area
    total_in = k[:, None, :] + k[None, :, :]
    conserve = np.all(
        np.isclose(total_in[:, :, None, None, :], total_in[None, None, :, :, :], atol=1e-9), axis=-1
    )
    tensor = conserve * khat[:, None, :, None]
    return tensor / basis.length**basis.dimension


def interaction_tensor(basis: ModeBasis, transform: Callable, transverse_area: float = 1.0) -> np.ndarray:
    """T_{pqrs} = ⟨e_p⊗e_q, K e_r⊗e_s⟩ with (p, r) acting on x and (q, s) on y.

    The pair operator is ½Σ T_{pqrs} a*_p a*_q a_s a_r.
    """
    pw = plane_wave_tensor(basis, transform, transverse_area)
    u = basis.transform
    return np.einsum("pa,qb,rc,sd,abcd->pqrs", u.conj(), u.conj(), u, u, pw, optimize=True)
