"""Pure probability and Pauli-frame algebra over entangled-pair records.

Everything here is a side-effect-free function of its inputs, shared by the
analytic planner and the event-driven simulator. Pairs follow a bit-flip
error model: a pair is either in the canonical correlated state or carries a
single X error, and its fidelity F is the weight of the canonical branch.
Corrections are never applied physically; they accumulate in a Pauli frame
(a pair of classical bits composed by XOR).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

from .errors import ConfigurationError, ProtocolError, UnsatisfiableError

__all__ = [
    "PauliFrame",
    "IDENTITY_FRAME",
    "Endpoint",
    "PairRecord",
    "LinkModel",
    "ErrorLocation",
    "PurifyMeasurements",
    "check_fidelity",
    "success_probability",
    "failure_prob_single",
    "failure_prob_multi",
    "min_fusiliers",
    "purify3_analytic",
    "purify3_decode",
    "purify3_frame_delta",
    "purify3_apply",
    "swap_compose_analytic",
    "swap_apply",
    "chain_fidelity",
]


def check_fidelity(value: float, *, name: str = "fidelity") -> float:
    """Validate a fidelity, warning about the unhelpful F < 0.5 regime.

    Values outside [0, 1] raise; values below 0.5 are legal for every
    operation in this module but purification cannot improve them, so
    validators flag them.
    """
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value!r}")
    if value < 0.5:
        warnings.warn(
            f"{name}={value} is below 0.5; purification cannot improve it",
            stacklevel=3,
        )
    return value


def _check_probability(value: float, *, name: str = "p") -> float:
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class PauliFrame:
    """Pending X/Z corrections, tracked classically instead of applied.

    Frames form a group under bitwise XOR: composition is associative,
    every frame is its own inverse, and (0, 0) is the identity.
    """

    x_bit: int = 0
    z_bit: int = 0

    def compose(self, other: "PauliFrame") -> "PauliFrame":
        return _FRAMES[self.x_bit ^ other.x_bit][self.z_bit ^ other.z_bit]

    __xor__ = compose

    @property
    def is_identity(self) -> bool:
        return self.x_bit == 0 and self.z_bit == 0


# Only four frame values exist; interning them keeps composition in the
# simulator's hot loops allocation-free.
_FRAMES = tuple(tuple(PauliFrame(x, z) for z in (0, 1)) for x in (0, 1))
IDENTITY_FRAME = _FRAMES[0][0]


class Endpoint(NamedTuple):
    """A qubit location: node index plus slot within that node."""

    node: int
    slot: int


@dataclass(slots=True)
class PairRecord:
    """One entangled pair: endpoints, X-error bit, frame, and provenance.

    ``x_error`` is the pair's error relative to the canonical state *after*
    all frame corrections are accounted for; ``frame`` is the pending
    correction that classical messages still have to deliver.
    ``model_fidelity`` is the analytic fidelity the error bit was (or would
    be) sampled from.
    """

    left: Endpoint
    right: Endpoint
    x_error: int
    frame: PauliFrame
    created_at_ns: int
    model_fidelity: float


@dataclass(frozen=True)
class LinkModel:
    """Per-hop link parameters: distance, success probability, raw fidelity.

    The per-signal success probability is either explicit (``p_success``) or
    derived from the attenuation form ``p0 * exp(-length_km / L0_km)``.
    Exactly one of the two parameterizations must be present.
    """

    length_km: float = 0.0
    p_success: Optional[float] = None
    raw_fidelity: float = 1.0
    p0: Optional[float] = None
    L0_km: Optional[float] = None

    def __post_init__(self) -> None:
        if self.length_km < 0:
            raise ConfigurationError(f"length_km must be >= 0, got {self.length_km!r}")
        explicit = self.p_success is not None
        attenuated = self.p0 is not None or self.L0_km is not None
        if explicit and attenuated:
            raise ConfigurationError(
                "give either p_success or (p0, L0_km), not both"
            )
        if not explicit:
            if self.p0 is None or self.L0_km is None:
                raise ConfigurationError(
                    "give either p_success or both of (p0, L0_km)"
                )
            _check_probability(self.p0, name="p0")
            if self.L0_km <= 0:
                raise ConfigurationError(f"L0_km must be > 0, got {self.L0_km!r}")
        else:
            _check_probability(self.p_success, name="p_success")
        check_fidelity(self.raw_fidelity, name="raw_fidelity")


def success_probability(model: LinkModel) -> float:
    """Per-signal entanglement success probability of a link."""
    if model.p_success is not None:
        return model.p_success
    return model.p0 * math.exp(-model.length_km / model.L0_km)


def failure_prob_single(n: int, p: float) -> float:
    """Probability that none of ``n`` independent attempts succeed: (1-p)**n."""
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n!r}")
    _check_probability(p)
    return (1.0 - p) ** n


def failure_prob_multi(n: int, m: int, p: float) -> float:
    """Probability that fewer than ``m`` of ``n`` attempts succeed.

    This is the lower binomial tail P[successes <= m-1] for n Bernoulli(p)
    trials, evaluated by direct summation. Double precision is ample at the
    scales used here; the smallest contributing terms are far above
    underflow. Reduces to :func:`failure_prob_single` at m = 1.
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n!r}")
    if m < 1:
        raise ConfigurationError(f"m must be >= 1, got {m!r}")
    if m > n:
        raise ConfigurationError(
            f"cannot fill m={m} receiver slots with only n={n} signals"
        )
    _check_probability(p)
    q = 1.0 - p
    return math.fsum(
        math.comb(n, k) * p**k * q ** (n - k) for k in range(m)
    )


def min_fusiliers(m: int, p: float, target_pf: float) -> int:
    """Smallest fusillade size n >= m with failure probability below target.

    Uses the strict inequality failure_prob_multi(n, m, p) < target_pf.
    Monotone non-decreasing in m and in 1/target_pf.
    """
    if m < 1:
        raise ConfigurationError(f"m must be >= 1, got {m!r}")
    if not 0.0 < target_pf < 1.0:
        raise ConfigurationError(
            f"target_pf must lie in (0, 1), got {target_pf!r}"
        )
    _check_probability(p)
    if p == 0.0:
        raise UnsatisfiableError(
            "p=0 signals never succeed, no fusillade size works"
        )
    n = m
    while failure_prob_multi(n, m, p) >= target_pf:
        n += 1
    return n


def purify3_analytic(fidelity: float) -> float:
    """Fidelity after consuming three pairs of fidelity F: F^3 + 3F^2(1-F).

    Fixed points at 0, 0.5, and 1; strictly improving on (0.5, 1).
    """
    return fidelity**3 + 3.0 * fidelity**2 * (1.0 - fidelity)


class ErrorLocation(Enum):
    """Which pair the repetition-code decoder blames for a syndrome."""

    NONE = "none"
    PAIR1 = "pair1"
    PAIR2 = "pair2"
    PAIR3 = "pair3"


_DECODE = {
    (0, 0): ErrorLocation.NONE,
    (1, 0): ErrorLocation.PAIR1,
    (1, 1): ErrorLocation.PAIR2,
    (0, 1): ErrorLocation.PAIR3,
}


def purify3_decode(syndrome_12: int, syndrome_23: int) -> ErrorLocation:
    """Minimal-weight error location for the two repetition-code syndromes."""
    return _DECODE[(syndrome_12 & 1, syndrome_23 & 1)]


class PurifyMeasurements(NamedTuple):
    """Raw outcomes of one three-pair purification round.

    Parities are measured pairwise (pairs 1,2 then 2,3) on the transmitting
    and receiving side; the four X readouts come from measuring out the
    second and third qubit on each side.
    """

    tx_parity_12: int
    tx_parity_23: int
    rx_parity_12: int
    rx_parity_23: int
    tx_x2: int
    tx_x3: int
    rx_x2: int
    rx_x3: int


def purify3_frame_delta(meas: PurifyMeasurements) -> PauliFrame:
    """Frame update from one purification round.

    The four parity bits combine into the pending X correction; the four
    X-basis readouts combine into the pending Z correction. The convention
    is internal: only self-consistency of the XOR algebra is relied on.
    """
    x = meas.tx_parity_12 ^ meas.tx_parity_23 ^ meas.rx_parity_12 ^ meas.rx_parity_23
    z = meas.tx_x2 ^ meas.tx_x3 ^ meas.rx_x2 ^ meas.rx_x3
    return _FRAMES[x & 1][z & 1]


@lru_cache(maxsize=256)
def _purify3_kept_fidelity(f1: float, f2: float, f3: float) -> float:
    # Exact enumeration of the 8 error patterns the decoder can face;
    # equals purify3_analytic(F) when all three inputs share fidelity F.
    residual = 0.0
    for e1 in (0, 1):
        w1 = (1.0 - f1) if e1 else f1
        for e2 in (0, 1):
            w2 = (1.0 - f2) if e2 else f2
            for e3 in (0, 1):
                w3 = (1.0 - f3) if e3 else f3
                blamed = _DECODE[(e1 ^ e2, e2 ^ e3)]
                if e1 ^ (blamed is ErrorLocation.PAIR1):
                    residual += w1 * w2 * w3
    return 1.0 - residual


def purify3_apply(
    pairs: Sequence[PairRecord], meas: PurifyMeasurements
) -> PairRecord:
    """Consume three same-hop pairs and return the kept (first) pair.

    The syndromes are the XOR of transmit- and receive-side parities; the
    decoder corrects the kept pair only when it blames pair 1, so the kept
    ``x_error`` is the residual after decoding. The kept frame composes the
    input frames with the round's frame delta. Over random inputs the
    residual error rate equals 1 - purify3_analytic(F).
    """
    if len(pairs) != 3:
        raise ProtocolError(f"purification consumes exactly 3 pairs, got {len(pairs)}")
    first, second, third = pairs
    for other in (second, third):
        if other.left.node != first.left.node or other.right.node != first.right.node:
            raise ProtocolError(
                "purified pairs must share one hop, got "
                f"{first.left.node}-{first.right.node} and "
                f"{other.left.node}-{other.right.node}"
            )
    syndrome_12 = (meas.tx_parity_12 ^ meas.rx_parity_12) & 1
    syndrome_23 = (meas.tx_parity_23 ^ meas.rx_parity_23) & 1
    blamed = purify3_decode(syndrome_12, syndrome_23)
    residual = first.x_error ^ (1 if blamed is ErrorLocation.PAIR1 else 0)
    frame = (
        first.frame
        .compose(second.frame)
        .compose(third.frame)
        .compose(purify3_frame_delta(meas))
    )
    return PairRecord(
        left=first.left,
        right=first.right,
        x_error=residual,
        frame=frame,
        created_at_ns=max(first.created_at_ns, second.created_at_ns, third.created_at_ns),
        model_fidelity=_purify3_kept_fidelity(
            first.model_fidelity, second.model_fidelity, third.model_fidelity
        ),
    )


def swap_compose_analytic(f1: float, f2: float) -> float:
    """Fidelity after swapping two pairs: independent error bits XOR.

    F12 = F1*F2 + (1-F1)(1-F2); equivalently the biases g = 2F-1 multiply.
    """
    return f1 * f2 + (1.0 - f1) * (1.0 - f2)


def swap_apply(
    left: PairRecord, right: PairRecord, parity_outcome: int, x_outcome: int
) -> PairRecord:
    """Join two pairs meeting at a common node into one spanning pair.

    The parity-gate outcome feeds the spanning frame's X bit and the
    X-basis readout its Z bit; the error bits XOR.
    """
    if left.right.node != right.left.node:
        raise ProtocolError(
            f"pairs do not meet at one node: {left.right.node} vs {right.left.node}"
        )
    frame = left.frame.compose(right.frame).compose(
        _FRAMES[parity_outcome & 1][x_outcome & 1]
    )
    return PairRecord(
        left=left.left,
        right=right.right,
        x_error=left.x_error ^ right.x_error,
        frame=frame,
        created_at_ns=max(left.created_at_ns, right.created_at_ns),
        model_fidelity=swap_compose_analytic(left.model_fidelity, right.model_fidelity),
    )


def chain_fidelity(hop_fidelities: Sequence[float]) -> float:
    """Closed form for iterated swap composition: (1 + prod(2F - 1)) / 2.

    Equals a fold of swap_compose_analytic in any association order.
    """
    if len(hop_fidelities) == 0:
        raise ConfigurationError("chain_fidelity needs at least one hop")
    bias = 1.0
    for f in hop_fidelities:
        bias *= 2.0 * f - 1.0
    return (1.0 + bias) / 2.0
