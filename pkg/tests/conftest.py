"""Shared fixtures: seeded randomness, registry isolation and an independent closure oracle."""

import numpy as np
import pytest

from services.operator_algebra import HermitianOperator, random_hermitian, random_unitary
from services.repository import GateRegistry


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture(autouse=True)
def fresh_registry():
    """Every test starts from an empty gate registry."""
    GateRegistry.reset_singleton()
    yield
    GateRegistry.reset_singleton()


@pytest.fixture
def hermitian_factory(rng):
    def make(n: int, traceless: bool = False) -> HermitianOperator:
        return random_hermitian(n, rng, traceless=traceless)

    return make


@pytest.fixture
def unitary_factory(rng):
    return lambda n: random_unitary(n, rng)


@pytest.fixture
def unit_observable_factory(rng):
    """Random unit-norm traceless observable."""

    def make(n: int) -> HermitianOperator:
        h = random_hermitian(n, rng, traceless=True)
        norm = np.sqrt(np.trace(h.matrix @ h.matrix).real / n)
        return HermitianOperator(h.matrix / norm)

    return make


def krylov_closure(h: HermitianOperator, o: HermitianOperator, tol: float = 1e-9) -> int:
    """Dimension of span{o, ad_h o, ad_h^2 o, ...} via Arnoldi on the vectorized superoperator."""
    n = h.dim
    identity = np.eye(n)
    superop = 1j * (np.kron(h.matrix, identity) - np.kron(identity, h.matrix.T))
    scale = max(np.linalg.norm(superop, 2), 1.0)
    v = o.matrix.reshape(-1)
    basis = [v / np.linalg.norm(v)]
    while len(basis) < n * n:
        w = superop @ basis[-1]
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm <= tol * scale:
            break
        basis.append(w / norm)
    return len(basis)


@pytest.fixture
def closure_oracle():
    return krylov_closure
