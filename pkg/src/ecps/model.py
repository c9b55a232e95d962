"""Spin-band model: a degenerate two-state system coupled to an environment of
N equidistant, doubly degenerate energy levels.

The environment has 2N states |n, i> with level n in 1..N and branch i in
{1, 2}; the composite space has dimension 4N. All modules use the fixed
basis ordering of :class:`BasisIndex` (system-major, then level, then
branch) instead of ad-hoc index arithmetic.

Two interaction channels couple system and environment:

* branch channel -- flips the system up (``SIGMA_PLUS``) while moving an
  environment excitation from branch 2 to branch 1, weight ``1 - xi``;
* rotated channel -- the same structure conjugated into the x bases of both
  the system and the branch pair (``SIGMA_PLUS_X``, |n,+> <n,-|),
  weight ``xi``.

Couplings are iid complex Gaussians with unit second moment <|c|^2> = 1 and
vanishing pseudo-variance <c c> = 0, drawn from the counter-based numpy
Philox generator so runs are bit-reproducible from a 64-bit seed.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import is_density, kron

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: maps |0> to |1> (matrix [[0,0],[1,0]] in the fixed |0>,|1> ordering)
SIGMA_PLUS = 0.5 * (PAULI_X - 1j * PAULI_Y)
SIGMA_MINUS = SIGMA_PLUS.conj().T
#: x-basis counterpart of SIGMA_PLUS: maps |+> to -i|-> with |+-> = (|0> +- |1>)/sqrt(2)
SIGMA_PLUS_X = 0.5 * (PAULI_Y - 1j * PAULI_Z)
SIGMA_MINUS_X = SIGMA_PLUS_X.conj().T


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one model instance.

    n_levels: number of environment levels N (the environment has 2N states)
    delta_eps: band width (energy units)
    alpha: coupling strength (dimensionless)
    xi: interaction mixing in [0, 1]; 0 = pure branch channel, 1 = pure rotated channel
    seed: 64-bit RNG seed (numpy Philox, counter based)
    """

    n_levels: int
    delta_eps: float
    alpha: float
    xi: float
    seed: int

    def __post_init__(self):
        if self.n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        if self.delta_eps <= 0:
            raise ValueError("delta_eps must be > 0")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError("xi must lie in [0, 1]")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")

    @property
    def gamma(self) -> float:
        """Band density prefactor 2*pi/delta_eps."""
        return 2.0 * np.pi / self.delta_eps

    @property
    def relaxation_rate(self) -> float:
        """Golden-rule rate lambda = alpha^2 * gamma * N that sets the clock
        of the reduced dynamics."""
        return self.alpha ** 2 * self.gamma * self.n_levels

    def with_seed(self, seed: int) -> "ModelParams":
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class CouplingSet:
    """One draw of the two independent N x N complex Gaussian coupling matrices."""

    c: np.ndarray
    c_prime: np.ndarray


class BasisIndex:
    """Bijective map (system m, level n, branch i) <-> flat composite index.

    Ordering is system-major, then level, then branch:
    ``flat = m * 2N + (n - 1) * 2 + (i - 1)`` with m in {0,1}, n in 1..N,
    i in {1,2}. Environment-only indices drop the leading system block.
    """

    def __init__(self, n_levels: int):
        if n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        self.n_levels = int(n_levels)
        self.env_dim = 2 * self.n_levels
        self.dim = 2 * self.env_dim

    def flat(self, m: int, n: int, i: int) -> int:
        self._check(m, n, i)
        return m * self.env_dim + (n - 1) * 2 + (i - 1)

    def env_flat(self, n: int, i: int) -> int:
        self._check(0, n, i)
        return (n - 1) * 2 + (i - 1)

    def unflat(self, idx: int):
        if not 0 <= idx < self.dim:
            raise ValueError(f"index {idx} out of range")
        m, env = divmod(idx, self.env_dim)
        n, i = divmod(env, 2)
        return m, n + 1, i + 1

    def env_ket(self, n: int, i: int) -> np.ndarray:
        v = np.zeros(self.env_dim, dtype=complex)
        v[self.env_flat(n, i)] = 1.0
        return v

    def _check(self, m, n, i):
        if m not in (0, 1):
            raise ValueError(f"system index m={m} must be 0 or 1")
        if not 1 <= n <= self.n_levels:
            raise ValueError(f"level index n={n} out of 1..{self.n_levels}")
        if i not in (1, 2):
            raise ValueError(f"branch index i={i} must be 1 or 2")


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based generator (numpy Philox 4x64-10) keyed from ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed) & (2 ** 64 - 1)))


def sample_couplings(params: ModelParams) -> CouplingSet:
    """Draw both coupling matrices for one realization.

    Entries are (x + iy)/sqrt(2) with x, y standard normal, so
    <|c|^2> = 1 and <c^2> = 0. The branch-channel matrix ``c`` is drawn
    first, then ``c_prime``, from a single Philox stream.
    """
    rng = rng_for(params.seed)
    n = params.n_levels

    def draw():
        return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)

    return CouplingSet(c=draw(), c_prime=draw())


def build_h0(params: ModelParams) -> np.ndarray:
    """Free Hamiltonian: diagonal energy delta_eps * n / N for state (m, n, i).

    Acts only on the environment level index; the two system states are
    degenerate and both branches of a level share its energy.
    """
    energies = np.repeat(params.delta_eps * np.arange(1, params.n_levels + 1)
                         / params.n_levels, 2)
    return np.diag(np.tile(energies, 2)).astype(complex)


def _branch_ladder(params: ModelParams, couplings: np.ndarray, rotated: bool) -> np.ndarray:
    """Environment ladder sum_{n1,n2} c[n1,n2] |n1,a><n2,b| with (a, b) the
    branch pair (1, 2), or (+, -) when ``rotated``."""
    n = params.n_levels
    env_dim = 2 * n
    if not rotated:
        up = np.zeros((env_dim, n), dtype=complex)
        dn = np.zeros((env_dim, n), dtype=complex)
        up[0::2, :] = np.eye(n)      # |n, 1>
        dn[1::2, :] = np.eye(n)      # |n, 2>
    else:
        up = np.zeros((env_dim, n), dtype=complex)
        dn = np.zeros((env_dim, n), dtype=complex)
        up[0::2, :] = np.eye(n) / np.sqrt(2.0)   # |n, +>
        up[1::2, :] = np.eye(n) / np.sqrt(2.0)
        dn[0::2, :] = np.eye(n) / np.sqrt(2.0)   # |n, ->
        dn[1::2, :] = -np.eye(n) / np.sqrt(2.0)
    return up @ couplings @ dn.conj().T


def build_v(params: ModelParams, couplings: CouplingSet):
    """Interaction terms (v1, v2), both Hermitian 4N x 4N matrices.

    v1 = (1-xi) * (SIGMA_PLUS (x) B + h.c.) moves branch 2 -> 1,
    v2 = xi * (SIGMA_PLUS_X (x) B' + h.c.) moves branch - -> + in the
    rotated pair basis. Prefactors (1-xi) and xi are included.
    """
    b1 = _branch_ladder(params, couplings.c, rotated=False)
    b2 = _branch_ladder(params, couplings.c_prime, rotated=True)
    v1 = kron(SIGMA_PLUS, b1)
    v1 = (1.0 - params.xi) * (v1 + v1.conj().T)
    v2 = kron(SIGMA_PLUS_X, b2)
    v2 = params.xi * (v2 + v2.conj().T)
    return v1, v2


def build_hamiltonian(params: ModelParams, couplings: CouplingSet) -> np.ndarray:
    """Total Hamiltonian H0 + alpha * (v1 + v2)."""
    v1, v2 = build_v(params, couplings)
    return build_h0(params) + params.alpha * (v1 + v2)


def branch_rotation(theta: float) -> np.ndarray:
    """2x2 proper rotation whose columns are the rotated branch kets:
    |1,theta> = cos |1> + sin |2>, |2,theta> = -sin |1> + cos |2>.

    theta = 0 keeps the branch basis, theta = pi/4 gives the (+,-) pair
    (the second ket picks up an irrelevant sign)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def build_projector(theta: float, branch: int, params: ModelParams) -> np.ndarray:
    """Rank-N environment projector onto the theta-rotated branch ``branch``.

    Returns the 2N x 2N matrix sum_n |n,branch,theta><n,branch,theta|.
    The two projectors for a given theta are orthogonal and complete.
    """
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    u = branch_rotation(theta)
    col = u[:, branch - 1]
    block = np.outer(col, col.conj())
    return np.kron(np.eye(params.n_levels), block)


def initial_state(sys: np.ndarray, env_spec, params: ModelParams) -> np.ndarray:
    """Composite product state sys (x) (normalized environment state).

    ``env_spec`` is one of
      * ``("branch_projector", theta, branch)`` -- projector / N,
      * ``"plus_projector"``                    -- the (theta=pi/4, branch=1) case,
      * ``"maximally_mixed"``                   -- identity / 2N.

    Raises ValueError when ``sys`` is not a density matrix.
    """
    sys = np.asarray(sys, dtype=complex)
    if sys.shape != (2, 2) or not is_density(sys):
        raise ValueError("system part must be a 2x2 density matrix")
    if env_spec == "maximally_mixed":
        env = np.eye(2 * params.n_levels, dtype=complex) / (2 * params.n_levels)
    elif env_spec == "plus_projector":
        env = build_projector(np.pi / 4, 1, params) / params.n_levels
    elif isinstance(env_spec, tuple) and len(env_spec) == 3 and env_spec[0] == "branch_projector":
        _, theta, branch = env_spec
        env = build_projector(float(theta), int(branch), params) / params.n_levels
    else:
        raise ValueError(f"unknown environment spec {env_spec!r}")
    return kron(sys, env)


def branch_parity(params: ModelParams) -> np.ndarray:
    """Environment branch parity: +1 on branch 2, -1 on branch 1 (2N x 2N)."""
    return np.kron(np.eye(params.n_levels), np.diag([-1.0, 1.0])).astype(complex)


def conserved_charge(params: ModelParams) -> np.ndarray:
    """Charge commuting with the branch channel: system inversion plus branch
    parity, i.e. (|1><1| - |0><0|) (x) I + I (x) (P2 - P1).

    For xi = 0 this commutes with the full Hamiltonian, so its expectation is
    constant along exact trajectories.
    """
    sys_inversion = np.diag([-1.0, 1.0]).astype(complex)
    env_dim = 2 * params.n_levels
    return (kron(sys_inversion, np.eye(env_dim))
            + kron(np.eye(2), branch_parity(params)))
