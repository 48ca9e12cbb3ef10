"""State of a walker with one coin qubit and a ring of 2**n positions.

Amplitudes are stored coin-major: a flat statevector of length 2 * 2**n
where entry ``c * 2**n + x`` holds the amplitude of coin state ``c`` at
position ``x``. Coin index 0 is "up", index 1 is "down". Internally the
same buffer is viewed as a (2, 2**n) array so operators can act on whole
coin rows at once.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

MAX_POSITION_QUBITS = 24
NORM_TOL = 1e-10
UNITARITY_TOL = 1e-10

STATE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class WalkerState:
    """Immutable walker state.

    ``amps`` has shape (2, num_positions), dtype complex128, and is marked
    read-only on construction. Operations return new states rather than
    mutating in place. Flattening ``amps`` row-major recovers the canonical
    coin-major statevector.
    """

    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.ndim == 1:
            if amps.size % 2 != 0:
                raise ValueError("flat statevector length must be even")
            amps = amps.reshape(2, -1)
        if amps.ndim != 2 or amps.shape[0] != 2:
            raise ValueError(f"expected shape (2, M), got {amps.shape}")
        m = amps.shape[1]
        n = m.bit_length() - 1
        if m < 2 or (1 << n) != m:
            raise ValueError(f"number of positions must be a power of two >= 2, got {m}")
        if n > MAX_POSITION_QUBITS:
            raise ValueError(f"{n} position qubits exceeds the cap of {MAX_POSITION_QUBITS}")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        amps = np.ascontiguousarray(amps)
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def num_positions(self) -> int:
        return self.amps.shape[1]

    @property
    def num_position_qubits(self) -> int:
        return self.num_positions.bit_length() - 1

    @property
    def flat(self) -> np.ndarray:
        """Canonical coin-major statevector of length 2 * num_positions."""
        return self.amps.reshape(-1)

    def norm_sq(self) -> float:
        a = self.amps
        return float(np.sum(a.real * a.real + a.imag * a.imag))


def initial_state(num_position_qubits: int, alpha: complex, beta: complex, x0: int = 0) -> WalkerState:
    """Product state (alpha |up> + beta |down>) at position ``x0``.

    The coin amplitudes must be normalised: | |alpha|^2 + |beta|^2 - 1 |
    may not exceed 1e-10.
    """
    if not 1 <= num_position_qubits <= MAX_POSITION_QUBITS:
        raise ValueError(
            f"num_position_qubits must be in [1, {MAX_POSITION_QUBITS}], got {num_position_qubits}"
        )
    alpha = complex(alpha)
    beta = complex(beta)
    nrm = abs(alpha) ** 2 + abs(beta) ** 2
    if not math.isfinite(nrm) or abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"coin amplitudes are not normalised: |alpha|^2 + |beta|^2 = {nrm!r}")
    m = 1 << num_position_qubits
    if not 0 <= x0 < m:
        raise ValueError(f"x0 must be in [0, {m}), got {x0}")
    amps = np.zeros((2, m), dtype=np.complex128)
    amps[0, x0] = alpha
    amps[1, x0] = beta
    return WalkerState(amps)


def position_distribution(state: WalkerState) -> np.ndarray:
    """Probability of each position, coin traced out. Sums to the state norm."""
    a = state.amps
    p = a.real * a.real + a.imag * a.imag
    return p[0] + p[1]


def apply_coin(state: WalkerState, coin: np.ndarray) -> WalkerState:
    """Apply a 2x2 coin unitary to the coin register at every position.

    Rejects matrices that are not unitary to within 1e-10. The product is
    formed elementwise on the two coin rows so repeated runs are bitwise
    reproducible.
    """
    coin = np.asarray(coin, dtype=np.complex128)
    if coin.shape != (2, 2):
        raise ValueError(f"coin must be 2x2, got shape {coin.shape}")
    if not np.all(np.isfinite(coin.view(np.float64))):
        raise ValueError("coin entries must be finite")
    dev = np.abs(coin.conj().T @ coin - np.eye(2)).max()
    if dev > UNITARITY_TOL:
        raise ValueError(f"coin is not unitary: max |C†C - I| = {dev:.3e}")
    up, dn = state.amps
    out = np.empty_like(state.amps)
    out[0] = coin[0, 0] * up + coin[0, 1] * dn
    out[1] = coin[1, 0] * up + coin[1, 1] * dn
    new = WalkerState(out)
    assert abs(new.norm_sq() - state.norm_sq()) <= NORM_TOL * max(1.0, state.norm_sq())
    return new


def state_to_json(state: WalkerState) -> str:
    """Serialise a state snapshot. Amplitudes are (re, im) pairs in flat order."""
    flat = state.flat
    payload = {
        "format_version": STATE_FORMAT_VERSION,
        "num_position_qubits": state.num_position_qubits,
        "amps": [[float(z.real), float(z.imag)] for z in flat],
    }
    return json.dumps(payload, indent=2) + "\n"


def state_from_json(text: str) -> WalkerState:
    payload = json.loads(text)
    if payload.get("format_version") != STATE_FORMAT_VERSION:
        raise ValueError(f"unsupported state format_version: {payload.get('format_version')!r}")
    pairs = payload["amps"]
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    state = WalkerState(flat)
    if state.num_position_qubits != payload["num_position_qubits"]:
        raise ValueError("num_position_qubits disagrees with amplitude count")
    return state
