"""Complex structures from (A, B) or (Z, Y) blocks and their algebraic checks."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import phase, spectral
from .errors import InvalidStructureError, SingularityError
from .phase import BlockMatrix2, PhaseVector

COND_WARN = 1e12


def _inv(M, name):
    M = np.asarray(M, dtype=float)
    try:
        cond = np.linalg.cond(M)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond):
        raise SingularityError(f"{name} is singular")
    if cond > COND_WARN:
        warnings.warn(f"{name} is ill conditioned (cond = {cond:.2e})", RuntimeWarning, stacklevel=3)
    return np.linalg.inv(M)


@dataclass(frozen=True)
class ComplexStructureBlocks:
    """Blocks of J at one time.

    A, B act on (phi, pi) data; D_w = diag(N / sqrt(h)) links them to the
    scalar blocks, Y = B D_w^{-1} and Z = -A. ``weights`` is the measure mu
    used for adjoints of the scalar blocks.
    """
    A: np.ndarray
    B: np.ndarray
    density: np.ndarray
    weights: np.ndarray
    orientation: int = -1
    time_tag: float = 0.0
    B_inv: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    Y_inv: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    # C and D supplied from a spectral representation, bypassing B^{-1} products
    C_given: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    D_given: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @classmethod
    def from_AY(cls, A, Y, density, weights, orientation=-1, time_tag=0.0, Y_inv=None, C=None, D=None):
        """density is N / sqrt(h) per site; B = Y diag(density)."""
        density = np.asarray(density, dtype=float)
        Y = np.asarray(Y, dtype=float)
        B = Y * density[None, :]
        B_inv = None if Y_inv is None else np.asarray(Y_inv) / density[:, None]
        return cls(np.asarray(A, dtype=float), B, density, np.asarray(weights, dtype=float),
                   orientation, time_tag, B_inv, Y_inv, C, D)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def with_orientation(self, sigma: int) -> "ComplexStructureBlocks":
        return ComplexStructureBlocks(self.A, self.B, self.density, self.weights, sigma,
                                      self.time_tag, self.B_inv, self.Y_inv, self.C_given, self.D_given)

    def binv(self):
        return self.B_inv if self.B_inv is not None else _inv(self.B, "B")

    def yinv(self):
        return self.Y_inv if self.Y_inv is not None else _inv(self.Y, "Y")

    @property
    def Y(self):
        return self.B / self.density[None, :]

    @property
    def Z(self):
        return -self.A

    @property
    def C(self):
        if self.C_given is not None:
            return self.C_given
        Bi = self.binv()
        return -Bi @ self.A @ self.B

    @property
    def D(self):
        if self.D_given is not None:
            return self.D_given
        Bi = self.binv()
        return -Bi @ (np.eye(self.n) + self.A @ self.A)

    def relation_residuals(self) -> dict:
        """A^2 + BD = -1, C^2 + DB = -1, AB + BC = 0, DA + CD = 0."""
        A, B, C, D = self.A, self.B, self.C, self.D
        I = np.eye(self.n)
        return {
            "A2+BD+1": float(np.linalg.norm(A @ A + B @ D + I)),
            "C2+DB+1": float(np.linalg.norm(C @ C + D @ B + I)),
            "AB+BC": float(np.linalg.norm(A @ B + B @ C)),
            "DA+CD": float(np.linalg.norm(D @ A + C @ D)),
        }


def assemble_J(blocks: ComplexStructureBlocks) -> BlockMatrix2:
    """sigma [[-A, -B], [-D, -C]] acting on (phi, pi)."""
    s = blocks.orientation
    return BlockMatrix2(-s * blocks.A, -s * blocks.B, -s * blocks.D, -s * blocks.C)


def assemble_JY(blocks: ComplexStructureBlocks) -> BlockMatrix2:
    """-sigma [[A, Y], [-Y^{-1}(1 + A^2), -Y^{-1} A Y]] acting on (phi, d_t phi); equals T J T^{-1}."""
    s = blocks.orientation
    A, Y = blocks.A, blocks.Y
    Yi = blocks.yinv()
    I = np.eye(blocks.n)
    return BlockMatrix2(-s * A, -s * Y, s * Yi @ (I + A @ A), s * Yi @ A @ Y)


def _weighted_adjoint(M, w):
    return (M.T * w[None, :]) / w[:, None]


def epsilon_adjoint(J: BlockMatrix2, weights=None) -> BlockMatrix2:
    """epsilon J^dagger epsilon^T with blockwise adjoints (mu weighted when weights are given)."""
    if weights is None:
        adj = lambda M: np.asarray(M).T  # noqa: E731
    else:
        w = np.asarray(weights, dtype=float)
        adj = lambda M: _weighted_adjoint(np.asarray(M), w)  # noqa: E731
    # J^dagger = [[ul^+, ll^+], [ur^+, lr^+]], then conjugate by epsilon
    return BlockMatrix2(adj(J.lr), -adj(J.ur), -adj(J.ll), adj(J.ul))


def _rel(num, den):
    return float(np.linalg.norm(num) / max(np.linalg.norm(den), 1e-300))


def check_adjoint(blocks: ComplexStructureBlocks, path: str = "scalar") -> float:
    """||epsilon J^dagger epsilon^T + J||_F / ||J||_F.

    path 'scalar' uses J_Y with mu weighted adjoints, 'density' uses J
    with plain transposes.
    """
    if path == "scalar":
        J = assemble_JY(blocks)
        Js = epsilon_adjoint(J, blocks.weights)
    elif path == "density":
        J = assemble_J(blocks)
        Js = epsilon_adjoint(J)
    else:
        raise ValueError(f"unknown adjoint path {path!r}")
    return _rel(Js.dense() + J.dense(), J.dense())


def square_residual(J: BlockMatrix2) -> float:
    """||J^2 + 1||_F."""
    Jd = J.dense()
    return float(np.linalg.norm(Jd @ Jd + np.eye(Jd.shape[0])))


def symplectic_compatibility(J: BlockMatrix2, pairs, dx: float) -> float:
    """max |Omega(J P1, J P2) - Omega(P1, P2)| / (dx |P1| |P2|) over pairs."""
    return phase.symplectic_invariance_residual(J, pairs, dx)


def gram_matrix(blocks: ComplexStructureBlocks, dx: float, sigma: Optional[int] = None) -> np.ndarray:
    """Symmetric matrix G with {Phi, Phi} = Phi^T G Phi for real Phi."""
    b = blocks if sigma is None else blocks.with_orientation(sigma)
    S = phase.symplectic_matrix(b.n, dx)
    G = 2.0 * S @ assemble_J(b).dense()
    return 0.5 * (G + G.T)


def inner_product(blocks: ComplexStructureBlocks, p1: PhaseVector, p2: PhaseVector, dx: float = 1.0) -> complex:
    """{Phi1, Phi2} = 2 Omega(Phi1, J Phi2) + 2i Omega(Phi1, Phi2)."""
    J = assemble_J(blocks)
    return complex(2.0 * phase.symplectic_form(p1, J @ p2, dx), 2.0 * phase.symplectic_form(p1, p2, dx))


def select_orientation(blocks: ComplexStructureBlocks, dx: float = 1.0) -> int:
    """Sign sigma making Omega(Phi, sigma J Phi) positive definite."""
    G = gram_matrix(blocks, dx, sigma=1)
    ev = np.linalg.eigvalsh(G)
    if ev[0] > 0:
        return 1
    if ev[-1] < 0:
        return -1
    raise InvalidStructureError(
        f"Omega(Phi, J Phi) is indefinite (eigenvalues from {ev[0]:.3g} to {ev[-1]:.3g})")


def oriented(blocks: ComplexStructureBlocks, dx: float = 1.0) -> ComplexStructureBlocks:
    return blocks.with_orientation(select_orientation(blocks, dx))


def similarity_check(J1: BlockMatrix2, J2: BlockMatrix2, X: BlockMatrix2) -> float:
    """||J1 - X^{-1} J2 X||_F / ||J1||_F."""
    Xd = X.dense()
    Xi = _inv(Xd, "X")
    return _rel(J1.dense() - Xi @ J2.dense() @ Xd, J1.dense())


def sobolev_boundedness(blocks: ComplexStructureBlocks, op: spectral.SpectralOperator, s: float) -> float:
    """Norm of J_Y on W^{2s+1} x W^{2s}, with ||(phi, v)||^2 = ||H^{s+1/2} phi||^2 + ||H^s v||^2."""
    J = assemble_JY(blocks).dense()
    n = blocks.n
    P_up = spectral.spectral_power(op, s + 0.5)
    P_lo = spectral.spectral_power(op, s)
    Pi_up = spectral.spectral_power(op, -(s + 0.5))
    Pi_lo = spectral.spectral_power(op, -s)
    z = np.zeros((n, n))
    Dg = np.block([[P_up, z], [z, P_lo]])
    Dgi = np.block([[Pi_up, z], [z, Pi_lo]])
    r = np.sqrt(np.concatenate([op.weights, op.weights]))
    M = r[:, None] * (Dg @ J @ Dgi) / r[None, :]
    return float(np.linalg.norm(M, 2))


def sign_checks(blocks: ComplexStructureBlocks, rng: np.random.Generator, count: int = 100) -> dict:
    """Symmetry of B and D and the signs of their quadratic forms on random vectors."""
    B, D = blocks.B, blocks.D
    V = rng.standard_normal((count, blocks.n))
    qb = np.einsum("ij,jk,ik->i", V, B, V)
    qd = np.einsum("ij,jk,ik->i", V, D, V)
    return {
        "B_symmetry": _rel(B - B.T, B),
        "D_symmetry": _rel(D - D.T, D),
        "B_min_form": float(qb.min()),
        "D_max_form": float(qd.max()),
    }


@dataclass
class BatteryResult:
    square: float
    symplectic: float
    adjoint_scalar: float
    adjoint_density: float
    gram_min: float
    orientation: int
    relations: dict
    signs: dict
    similarity_T: float

    def as_dict(self):
        return dict(self.__dict__)


def battery(blocks: ComplexStructureBlocks, T: BlockMatrix2, dx: float,
            rng: np.random.Generator, pairs: int = 50) -> BatteryResult:
    """All algebraic checks of one block set. Orientation is selected first."""
    sigma = select_orientation(blocks, dx)
    b = blocks.with_orientation(sigma)
    J = assemble_J(b)
    JY = assemble_JY(b)
    prs = phase.random_pairs(rng, b.n, pairs)
    G = gram_matrix(b, dx)
    sim = _rel(T.dense() @ J.dense() @ np.linalg.inv(T.dense()) - JY.dense(), JY.dense())
    return BatteryResult(
        square=square_residual(J),
        symplectic=symplectic_compatibility(J, prs, dx),
        adjoint_scalar=check_adjoint(b, "scalar"),
        adjoint_density=check_adjoint(b, "density"),
        gram_min=float(np.linalg.eigvalsh(G)[0]),
        orientation=sigma,
        relations=b.relation_residuals(),
        signs=sign_checks(b, rng),
        similarity_T=sim,
    )
