"""Full error-correction experiments: conventional and tracking protocols.

Conventional protocol (``cycles`` rounds): every round adds channel noise to
each physical qubit of the block, measures the block transversally
(teleportation consumes a fresh perfect ancilla block, so deviations reset
each round), decodes, and the round's logical error toggles a running
parity.  The run fails when the final parity disagrees with the truth.

Tracking protocol: rounds 1..n-1 replace the block-level correction with
per-qubit single-qubit corrections whose measured deviations are only
*recorded*; round n performs the one block-level correction.  Each qubit
then carries n recorded deviations whose joint flip-parity likelihood
(:func:`joint_likelihood`) feeds a single decode.

Both protocols simulate one quadrature per trial; under the independent
Gaussian channel the q and p failure processes are independent and
identically distributed, so ``quadrature="both"`` simply runs two
independent single-quadrature simulations back to back (q first) for
cross-checking.  The transmitted codeword is fixed to all-zeros; linearity
of the code makes failure statistics identical for any codeword, and
:func:`run_conventional` accepts an explicit codeword to verify that.

This module is also the reference ("pure") Monte Carlo kernel: the compiled
kernel replicates its draw order and arithmetic operation for operation.
Draw order per trial: per cycle, one channel draw per qubit in qubit order,
followed (tracking, cycles 1..n-1) by that qubit's ancilla draws; an exactly
zero sigma consumes no draw.  Decoding consumes one uniform draw only on an
exact likelihood tie.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codes import block_size, decode
from .gkp import (
    SQRT_PI,
    LikelihoodPair,
    NoiseParams,
    digital_likelihoods,
    lattice_index,
    log_gauss,
)

_QUADRATURES = ("q", "p", "both")


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str  # "conventional" | "tracking"
    analog: bool
    level: int
    cycles: int
    noise: NoiseParams
    quadrature: str = "q"

    def __post_init__(self) -> None:
        if self.kind not in ("conventional", "tracking"):
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        min_cycles = 2 if self.kind == "tracking" else 1
        if self.cycles < min_cycles:
            raise ValueError(f"{self.kind} requires cycles >= {min_cycles}, got {self.cycles}")
        if self.quadrature not in _QUADRATURES:
            raise ValueError(f"quadrature must be one of {_QUADRATURES}, got {self.quadrature!r}")


@dataclass(frozen=True)
class TrialOutcome:
    failed: bool
    decoded_bit: int
    true_bit: int


def score_trial(decoded: int, truth: int) -> TrialOutcome:
    """Wrap a decoded-vs-truth comparison into a TrialOutcome."""
    return TrialOutcome(failed=decoded != truth, decoded_bit=decoded, true_bit=truth)


def joint_likelihood(records, sigma: float, analog: bool) -> LikelihoodPair:
    """Joint flip-parity likelihoods of one qubit across n recorded cycles.

    Each record contributes a per-cycle (even, odd) pair: analog from the
    Gaussian density of its deviation, digital from p_corr alone.  Pairs are
    combined by parity convolution, so ``l_match`` is the likelihood of an
    even number of flips across the cycles and ``l_flip`` of an odd number.
    """
    if len(records) == 0:
        raise ValueError("joint_likelihood needs at least one record")
    if analog:
        pairs = [_analog_pair(r, sigma) for r in records]
    else:
        d = digital_likelihoods(sigma)
        pairs = [(d.l_match, d.l_flip)] * len(records)
    even, odd = pairs[0]
    for e, o in pairs[1:]:
        even, odd = _lse2(even + e, odd + o), _lse2(even + o, odd + e)
    return LikelihoodPair(l_match=even, l_flip=odd)


def _analog_pair(deviation: float, sigma: float) -> tuple[float, float]:
    a = abs(deviation)
    if not (a <= SQRT_PI / 2.0):
        raise ValueError(f"record {deviation!r} outside the bin range")
    return log_gauss(a, sigma), log_gauss(SQRT_PI - a, sigma)


def _lse2(a: float, b: float) -> float:
    if a == b:
        return a + math.log(2.0) if a != -math.inf else a
    m, d = (a, b - a) if a > b else (b, a - b)
    return m + math.log1p(math.exp(d))


def _draw(sigma: float, rng) -> float:
    # zero sigma consumes no draw: keeps streams aligned across noise configs
    return sigma * rng.standard_normal() if sigma > 0.0 else 0.0


def run_conventional(cfg: ProtocolConfig, rng, codeword=None) -> TrialOutcome:
    """One conventional trial; ``codeword`` overrides the all-zeros frame.

    When a codeword (bit sequence of block length) is supplied, its bits are
    XORed into every cycle's measured bits and its first-pair class bit into
    the per-cycle truth, which must leave the failure indicator unchanged.
    """
    if cfg.kind != "conventional":
        raise ValueError("config is not a conventional-protocol config")
    if cfg.quadrature == "both":
        out_q = _conventional_single(cfg, rng, codeword)
        _conventional_single(cfg, rng, codeword)
        return out_q
    return _conventional_single(cfg, rng, codeword)


def _zero_noise_outcome(cfg: ProtocolConfig) -> TrialOutcome:
    # zero channel noise: trivially clean, no draws consumed.  With the
    # likelihood model keyed to the channel sigma, ancilla noise without
    # channel noise has no defined likelihoods.
    if cfg.noise.sigma_ancilla_q > 0.0 or cfg.noise.sigma_ancilla_p > 0.0:
        raise ValueError("sigma_channel = 0 with ancilla noise leaves likelihoods undefined")
    return score_trial(0, 0)


def _conventional_single(cfg: ProtocolConfig, rng, codeword=None) -> TrialOutcome:
    from .codes import concat_word_first_bit  # local import to avoid cycle at module load

    if cfg.noise.sigma_channel == 0.0:
        return _zero_noise_outcome(cfg)
    n = block_size(cfg.level)
    sigma = cfg.noise.sigma_channel
    truth_bit = 0
    if codeword is not None:
        if len(codeword) != n:
            raise ValueError(f"codeword length {len(codeword)} != block size {n}")
        truth_cycle = concat_word_first_bit(cfg.level, tuple(codeword))
    digital_pair = None if cfg.analog else digital_likelihoods(sigma)
    decoded = 0
    truth = 0
    for _ in range(cfg.cycles):
        bits = []
        lps = []
        for _i in range(n):
            dev = _draw(sigma, rng)
            s = lattice_index(dev)
            bits.append(s & 1)
            if cfg.analog:
                dm = dev - s * SQRT_PI
                lps.append(LikelihoodPair(*_analog_pair(dm, sigma)))
            else:
                lps.append(digital_pair)
        if codeword is not None:
            bits = [b ^ c for b, c in zip(bits, codeword)]
            truth ^= truth_cycle
        bit, _table = decode(cfg.level, bits, lps, rng)
        decoded ^= bit
    if codeword is not None:
        return score_trial(decoded, truth)
    return score_trial(decoded, truth_bit)


def run_tracking(cfg: ProtocolConfig, rng) -> TrialOutcome:
    """One tracking trial: n-1 recorded single-qubit corrections + one decode."""
    if cfg.kind != "tracking":
        raise ValueError("config is not a tracking-protocol config")
    if cfg.quadrature == "both":
        out_q = _tracking_single(cfg, rng, "q")
        _tracking_single(cfg, rng, "p")
        return out_q
    return _tracking_single(cfg, rng, cfg.quadrature)


def _tracking_single(cfg: ProtocolConfig, rng, quadrature: str) -> TrialOutcome:
    if cfg.noise.sigma_channel == 0.0:
        return _zero_noise_outcome(cfg)
    n = block_size(cfg.level)
    sigma = cfg.noise.sigma_channel
    sig_anc = cfg.noise.sigma_ancilla_q if quadrature == "q" else cfg.noise.sigma_ancilla_p
    dev = [0.0] * n
    flip = [0] * n
    records: list[list[float]] = [[] for _ in range(n)]
    for _cycle in range(cfg.cycles - 1):
        for i in range(n):
            dev[i] = dev[i] + _draw(sigma, rng)
            if quadrature == "q":
                # single-qubit correction, q quadrature (|+> ancilla measures
                # a1-shifted accumulated deviation; residual is -a2)
                a1 = _draw(sig_anc, rng)
                dev[i] = dev[i] + a1
                a2 = _draw(sig_anc, rng)
                m = a2 + dev[i]
                s = lattice_index(m)
                records[i].append(m - s * SQRT_PI)
                flip[i] ^= s & 1
                dev[i] = -a2
            else:
                # p quadrature: |0> ancilla measures a1 - deviation; the
                # second ancilla's p deviation leaks in after the correction
                a1 = _draw(sig_anc, rng)
                m = a1 - dev[i]
                s = lattice_index(m)
                records[i].append(m - s * SQRT_PI)
                flip[i] ^= s & 1
                a2 = _draw(sig_anc, rng)
                dev[i] = a1 - a2
    bits = []
    lps = []
    for i in range(n):
        dev[i] = dev[i] + _draw(sigma, rng)
        s = lattice_index(dev[i])
        bits.append(flip[i] ^ (s & 1))
        records[i].append(dev[i] - s * SQRT_PI)
        lps.append(joint_likelihood(records[i], sigma, cfg.analog))
    bit, _table = decode(cfg.level, bits, lps, rng)
    return score_trial(bit, 0)


def run_trial(cfg: ProtocolConfig, rng) -> TrialOutcome:
    """Run one trial of whichever protocol the config selects."""
    if cfg.kind == "conventional":
        return run_conventional(cfg, rng)
    return run_tracking(cfg, rng)


def run_trial_both(cfg: ProtocolConfig, rng) -> tuple[TrialOutcome, TrialOutcome]:
    """Run both quadratures' independent simulations; returns (q, p) outcomes."""
    if cfg.kind == "conventional":
        return _conventional_single(cfg, rng), _conventional_single(cfg, rng)
    return _tracking_single(cfg, rng, "q"), _tracking_single(cfg, rng, "p")
