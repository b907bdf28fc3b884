"""Gate and circuit types, builders for the built-in networks, dephasing patterns.

The built-in networks act on a four-qubit chain A-B-C-D (indices 0-3).  A and D
are the probes to be entangled; B and C form the mediator through which every
interaction is routed (there is no direct A-D gate anywhere below).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "A", "B", "C", "D",
    "Circuit",
    "DephasingPattern",
    "ExperimentConfig",
    "GateOp",
    "SLICE",
    "TimeSlice",
    "build_asymmetric",
    "build_staged",
    "build_symmetric",
    "cnot",
    "cphase",
    "exhaustive_patterns",
    "h",
    "partial_swap",
    "pattern_population",
    "phase_flip",
    "sample_patterns",
    "swap",
    "z",
]

A, B, C, D = 0, 1, 2, 3

GATE_KINDS = frozenset({"H", "CNOT", "CPHASE", "SWAP", "PARTIAL_SWAP", "Z", "PHASE_FLIP"})
_ARITY = {"H": 1, "Z": 1, "PHASE_FLIP": 1, "CNOT": 2, "CPHASE": 2, "SWAP": 2, "PARTIAL_SWAP": 2}

SYMBOLIC_P = "symbolic"


@dataclass(frozen=True)
class GateOp:
    """One gate or channel application; qubit order is significant for CNOT."""

    kind: str
    qubits: tuple[int, ...]
    alpha: float | None = None  # PARTIAL_SWAP exponent, in (0, 1]
    p: float | str | None = None  # PHASE_FLIP intensity in [0, 1], or "symbolic"

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind} qubits must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")
        if self.kind == "PARTIAL_SWAP":
            if self.alpha is None or not 0 < self.alpha <= 1:
                raise ValueError(f"partial swap exponent must lie in (0, 1], got {self.alpha!r}")
        elif self.alpha is not None:
            raise ValueError(f"{self.kind} takes no exponent")
        if self.kind == "PHASE_FLIP":
            if self.p != SYMBOLIC_P and (
                not isinstance(self.p, (int, float)) or not 0 <= self.p <= 1
            ):
                raise ValueError(f"phase-flip intensity must lie in [0, 1], got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.kind} takes no intensity")


@dataclass(frozen=True)
class TimeSlice:
    """Marker separating the labelled times t_0 ... t_k in a circuit."""


SLICE = TimeSlice()


def h(q: int) -> GateOp:
    return GateOp("H", (q,))


def z(q: int) -> GateOp:
    return GateOp("Z", (q,))


def cnot(control: int, target: int) -> GateOp:
    return GateOp("CNOT", (control, target))


def cphase(a: int, b: int) -> GateOp:
    return GateOp("CPHASE", (a, b))


def swap(a: int, b: int) -> GateOp:
    return GateOp("SWAP", (a, b))


def partial_swap(a: int, b: int, alpha: float) -> GateOp:
    return GateOp("PARTIAL_SWAP", (a, b), alpha=alpha)


def phase_flip(q: int, p) -> GateOp:
    return GateOp("PHASE_FLIP", (q,), p=p)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list with slice markers; t_0 is implicitly before the first op."""

    n: int
    ops: tuple

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if isinstance(op, TimeSlice):
                continue
            if not isinstance(op, GateOp):
                raise TypeError(f"circuit ops must be GateOp or TimeSlice, got {op!r}")
            if any(q >= self.n for q in op.qubits):
                raise ValueError(f"gate {op} out of range for n={self.n}")

    @property
    def gates(self) -> tuple[GateOp, ...]:
        return tuple(op for op in self.ops if isinstance(op, GateOp))

    @property
    def slice_count(self) -> int:
        """Number of labelled times, t_0 included."""
        return 1 + sum(1 for op in self.ops if isinstance(op, TimeSlice))


def build_symmetric(p=None) -> Circuit:
    """Symmetric entangling network on the A-B-C-D chain.

    Bell stages on (A,B) and (D,C), a controlled phase across the mediator
    link B-C, then closing CNOTs.  With ``p`` given, phase-flip channels of
    intensity p hit both mediator qubits between the phase gate and the
    closing CNOTs; the t_2 snapshot is taken after those channels so the
    reported descriptors carry their attenuation.  ``p`` may be the string
    "symbolic" to carry the attenuation factor formally.
    """
    if p is not None and p != SYMBOLIC_P and not 0 <= p <= 1:
        raise ValueError(f"dephasing intensity must lie in [0, 1], got {p!r}")
    ops: list = [h(A), cnot(A, B), h(D), cnot(D, C), SLICE, cphase(B, C)]
    if p is not None:
        ops += [phase_flip(B, p), phase_flip(C, p)]
    ops += [SLICE, cnot(A, B), cnot(D, C), SLICE]
    return Circuit(4, tuple(ops))


def build_asymmetric() -> Circuit:
    """Entangle A-B, then carry B's half to D through two full swaps."""
    return Circuit(4, (h(A), cnot(A, B), SLICE, swap(B, C), SLICE, swap(C, D), SLICE))


def build_staged(
    stages: int,
    pattern: "DephasingPattern | None" = None,
    interleaved: bool = False,
    z_first: bool = False,
) -> Circuit:
    """Asymmetric network with each swap split into ``stages`` partial swaps.

    Every stage applies ``SWAP^(1/stages)`` on its link; a pattern marks the
    stages followed by a Z on the mediator qubit C (the dephased variant of
    the stage gate).  ``z_first`` flips the Z to act before the partial swap
    instead, for sensitivity checks.  By default all B-C stages complete
    before the C-D stages begin; ``interleaved`` alternates the two links
    stage by stage (single combined slice).
    """
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    if pattern is not None and pattern.stages != stages:
        raise ValueError(
            f"pattern length {pattern.stages} does not match stage count {stages}"
        )
    alpha = 1.0 / stages
    bc = [False] * stages if pattern is None else list(pattern.bc_choices)
    cd = [False] * stages if pattern is None else list(pattern.cd_choices)

    def stage(link: tuple[int, int], dephased: bool) -> list[GateOp]:
        u = partial_swap(link[0], link[1], alpha)
        if not dephased:
            return [u]
        return [z(C), u] if z_first else [u, z(C)]

    ops: list = [h(A), cnot(A, B), SLICE]
    if interleaved:
        for k in range(stages):
            ops += stage((B, C), bc[k]) + stage((C, D), cd[k])
        ops.append(SLICE)
    else:
        for k in range(stages):
            ops += stage((B, C), bc[k])
        ops.append(SLICE)
        for k in range(stages):
            ops += stage((C, D), cd[k])
        ops.append(SLICE)
    return Circuit(4, tuple(ops))


@dataclass(frozen=True)
class DephasingPattern:
    """Per-stage gate choices for the two swap links; True selects the dephased gate."""

    bc_choices: tuple[bool, ...]
    cd_choices: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "bc_choices", tuple(bool(b) for b in self.bc_choices))
        object.__setattr__(self, "cd_choices", tuple(bool(b) for b in self.cd_choices))
        if len(self.bc_choices) != len(self.cd_choices):
            raise ValueError("both links must have the same stage count")

    @property
    def stages(self) -> int:
        return len(self.bc_choices)

    @property
    def balanced(self) -> bool:
        half = self.stages // 2
        return (
            self.stages % 2 == 0
            and sum(self.bc_choices) == half
            and sum(self.cd_choices) == half
        )


def pattern_population(stages: int, balanced: bool = True) -> int:
    """Number of distinct pattern pairs available."""
    if balanced:
        if stages % 2:
            raise ValueError("balanced patterns require an even stage count")
        return comb(stages, stages // 2) ** 2
    return (2 ** stages) ** 2


def _unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    # lexicographic unranking of a k-subset of range(n)
    positions = []
    idx = 0
    while k > 0:
        c = comb(n - 1, k - 1)
        if rank < c:
            positions.append(idx)
            k -= 1
        else:
            rank -= c
        n -= 1
        idx += 1
    return tuple(positions)


def _choices_from_rank(rank: int, stages: int, balanced: bool) -> tuple[bool, ...]:
    if balanced:
        chosen = set(_unrank_combination(rank, stages, stages // 2))
        return tuple(k in chosen for k in range(stages))
    return tuple(bool(rank >> (stages - 1 - k) & 1) for k in range(stages))


def _pattern_from_index(index: int, stages: int, balanced: bool, side: int) -> DephasingPattern:
    bc_rank, cd_rank = divmod(index, side)
    return DephasingPattern(
        _choices_from_rank(bc_rank, stages, balanced),
        _choices_from_rank(cd_rank, stages, balanced),
    )


def exhaustive_patterns(stages: int, balanced: bool = True) -> list[DephasingPattern]:
    """The full pattern population in canonical (lexicographic) order."""
    side = comb(stages, stages // 2) if balanced else 2 ** stages
    if balanced and stages % 2:
        raise ValueError("balanced patterns require an even stage count")
    total = side * side
    return [_pattern_from_index(i, stages, balanced, side) for i in range(total)]


def sample_patterns(
    stages: int, count: int, balanced: bool = True, seed: int = 0
) -> list[DephasingPattern]:
    """Draw ``count`` distinct pattern pairs uniformly, deterministically per seed.

    Asking for the whole population returns it exhaustively in canonical order.
    """
    population = pattern_population(stages, balanced)
    side = comb(stages, stages // 2) if balanced else 2 ** stages
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > population:
        raise ValueError(f"count {count} exceeds the pattern population {population}")
    if count == population:
        return exhaustive_patterns(stages, balanced)
    rng = np.random.default_rng(seed)
    seen: set[int] = set()
    order: list[int] = []
    while len(order) < count:
        idx = int(rng.integers(population))
        if idx not in seen:
            seen.add(idx)
            order.append(idx)
    return [_pattern_from_index(i, stages, balanced, side) for i in order]


@dataclass
class ExperimentConfig:
    """Flat description of one experiment run; maps 1:1 onto the CLI config file."""

    network: str = "symmetric"
    p: float | str | None = None
    epsilon: float = 1.0
    initial_bits: str = "0000"
    stages: int = 8
    patterns: str = "none"  # none | sampled:N | exhaustive
    seed: int = 0
    axes: str | None = None  # xz-zx | xx-zz; default chosen per network

    def to_dict(self) -> dict:
        return {
            "network": self.network,
            "p": self.p,
            "epsilon": self.epsilon,
            "initial_bits": self.initial_bits,
            "stages": self.stages,
            "patterns": self.patterns,
            "seed": self.seed,
            "axes": self.axes,
        }
