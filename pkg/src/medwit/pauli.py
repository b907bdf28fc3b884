"""Symbolic algebra of n-qubit Pauli words and complex-weighted Pauli polynomials.

Conventions, fixed project-wide: qubit 0 is the leftmost tensor factor and the
most significant bit of a computational-basis index.  All values here are
immutable after construction, so they can be shared freely between concurrent
workers without locking.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "BasisState",
    "PauliSum",
    "PauliTerm",
    "commutator",
    "expectation_basis",
    "identity_component",
    "mul",
    "operator_norm",
    "qubit_label",
    "single",
]

PAULI_LETTERS = "IXYZ"
PHASES = (1 + 0j, -1 + 0j, 1j, -1j)

#: coefficients below this modulus are pruned, keeping sums canonical under
#: repeated algebra
PRUNE_TOL = 1e-14
_IMAG_TOL = 1e-12

# single-qubit products a*b -> (phase, letter)
_MUL1 = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_PREFIX = {1 + 0j: "", -1 + 0j: "-", 1j: "i", -1j: "-i"}


def qubit_label(index: int) -> str:
    """Letter label for a qubit index: 0 -> 'A', 1 -> 'B', ..."""
    if 0 <= index < len(string.ascii_uppercase):
        return string.ascii_uppercase[index]
    return str(index)


def _as_scalar(c):
    # keep coefficients as builtin complex where possible so numpy scalars
    # never leak into term maps; symbolic coefficients pass through
    try:
        return complex(c)
    except TypeError:
        return c


def _word_mul(a: str, b: str) -> tuple[complex, str]:
    phase = 1 + 0j
    letters = []
    for la, lb in zip(a, b):
        ph, letter = _MUL1[la, lb]
        phase *= ph
        letters.append(letter)
    return phase, "".join(letters)


def _word_matrix(letters: str) -> np.ndarray:
    return reduce(np.kron, (PAULI_MATRICES[l] for l in letters))


@dataclass(frozen=True)
class PauliTerm:
    """A single n-qubit Pauli word with a phase in {+1, -1, +i, -i}."""

    letters: str
    phase: complex = 1 + 0j

    def __post_init__(self):
        if not self.letters or any(l not in PAULI_LETTERS for l in self.letters):
            raise ValueError(f"letters must be a nonempty string over IXYZ, got {self.letters!r}")
        phase = complex(self.phase)
        if phase not in PHASES:
            raise ValueError(f"phase must be one of +1, -1, +i, -i, got {self.phase!r}")
        object.__setattr__(self, "phase", phase)

    @property
    def n(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        return mul(self, other)

    def to_sum(self) -> "PauliSum":
        return PauliSum(self.n, {self.letters: self.phase})

    def dense(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix realization."""
        return self.phase * _word_matrix(self.letters)

    def render(self) -> str:
        """Canonical text form, e.g. 'q_zA q_xB', '-iq_yC', 'id'."""
        word = " ".join(
            f"q_{l.lower()}{qubit_label(q)}" for q, l in enumerate(self.letters) if l != "I"
        )
        return _PHASE_PREFIX[self.phase] + (word or "id")

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class BasisState:
    """Computational-basis state |b_0 b_1 ... b_{n-1}>, qubit 0 most significant."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be a nonempty 0/1 sequence, got {self.bits!r}")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    @classmethod
    def from_string(cls, text: str) -> "BasisState":
        return cls(tuple(int(c) for c in text.strip()))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        """Basis index with qubit 0 as the most significant bit."""
        return int("".join(str(b) for b in self.bits), 2)

    def __str__(self) -> str:
        return "|" + "".join(str(b) for b in self.bits) + ">"


class PauliSum:
    """Complex-weighted sum of Pauli words in canonical form.

    Canonical means: each letter word appears at most once and no coefficient
    is below ``PRUNE_TOL`` in modulus.  Coefficients are builtin complex
    numbers, or any scalar-like object supporting ``+``, ``*`` and ``abs``
    (used for symbolically attenuated descriptors).
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[str, complex] | None = None):
        if n < 1:
            raise ValueError("qubit count must be >= 1")
        merged: dict[str, complex] = {}
        for word, coeff in (terms or {}).items():
            if len(word) != n or any(l not in PAULI_LETTERS for l in word):
                raise ValueError(f"bad Pauli word {word!r} for n={n}")
            acc = merged.get(word)
            merged[word] = _as_scalar(coeff) if acc is None else _as_scalar(acc + coeff)
        object.__setattr__(self, "n", n)
        object.__setattr__(
            self, "_terms", {w: c for w, c in merged.items() if abs(c) > PRUNE_TOL}
        )

    def __setattr__(self, name, value):
        raise AttributeError("PauliSum is immutable")

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n, {})

    @classmethod
    def from_term(cls, term: PauliTerm) -> "PauliSum":
        return term.to_sum()

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[PauliTerm]) -> "PauliSum":
        out = cls.zero(n)
        for t in terms:
            out = out + t.to_sum()
        return out

    def items(self) -> list[tuple[str, complex]]:
        """Terms as (word, coefficient) pairs, sorted by word for determinism."""
        return sorted(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, word: str) -> complex:
        return self._terms.get(word, 0j)

    def _binary(self, other, sign) -> "PauliSum":
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} != {other.n}")
        terms = dict(self._terms)
        for word, coeff in other._terms.items():
            terms[word] = _as_scalar(terms.get(word, 0j) + sign * coeff)
        return PauliSum(self.n, terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if isinstance(other, PauliTerm):
            other = other.to_sum()
        return self._binary(other, 1)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        if isinstance(other, PauliTerm):
            other = other.to_sum()
        return self._binary(other, -1)

    def __neg__(self) -> "PauliSum":
        return PauliSum(self.n, {w: -c for w, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            other = other.to_sum()
        if isinstance(other, PauliSum):
            if self.n != other.n:
                raise ValueError(f"qubit count mismatch: {self.n} != {other.n}")
            terms: dict[str, complex] = {}
            for wa, ca in self._terms.items():
                for wb, cb in other._terms.items():
                    phase, word = _word_mul(wa, wb)
                    coeff = ca * cb * phase
                    acc = terms.get(word)
                    terms[word] = coeff if acc is None else acc + coeff
            return PauliSum(self.n, terms)
        return PauliSum(self.n, {w: c * other for w, c in self._terms.items()})

    def __rmul__(self, scalar) -> "PauliSum":
        return PauliSum(self.n, {w: scalar * c for w, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, PauliTerm):
            other = other.to_sum()
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def map_coefficients(self, fn) -> "PauliSum":
        return PauliSum(self.n, {w: fn(c) for w, c in self._terms.items()})

    def dense(self) -> np.ndarray:
        """Dense matrix realization; requires numeric coefficients."""
        dim = 2 ** self.n
        out = np.zeros((dim, dim), dtype=complex)
        for word, coeff in self._terms.items():
            out += complex(coeff) * _word_matrix(word)
        return out

    def __repr__(self) -> str:
        if not self._terms:
            return f"PauliSum(n={self.n}, 0)"
        body = " + ".join(f"({c})*{w}" for w, c in self.items())
        return f"PauliSum(n={self.n}, {body})"


def single(n: int, qubit: int, axis: str) -> PauliTerm:
    """Single-letter word: the given Pauli axis on one qubit, identity elsewhere."""
    axis = axis.upper()
    if axis not in "XYZ":
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for n={n}")
    return PauliTerm("I" * qubit + axis + "I" * (n - qubit - 1))


def mul(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product of two Pauli words with exact phase bookkeeping."""
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} != {b.n}")
    phase, word = _word_mul(a.letters, b.letters)
    return PauliTerm(word, a.phase * b.phase * phase)


def _lift(a) -> PauliSum:
    return a.to_sum() if isinstance(a, PauliTerm) else a


def commutator(a, b) -> PauliSum:
    """ab - ba in canonical form; accepts PauliTerm or PauliSum operands."""
    a, b = _lift(a), _lift(b)
    return a * b - b * a


def operator_norm(a, max_qubits: int = 6) -> float:
    """Spectral norm (largest singular value) of the dense realization of ``a``.

    Dense evaluation only; refuses registers above ``max_qubits``.
    """
    a = _lift(a)
    if a.n > max_qubits:
        raise ValueError(
            f"operator_norm evaluates densely and is limited to {max_qubits} qubits; got n={a.n}"
        )
    if not a:
        return 0.0
    return float(np.linalg.norm(a.dense(), ord=2))


def expectation_basis(state: BasisState, a) -> float:
    """<state|a|state> for a computational-basis state.

    A term contributes only if its word lies in {I, Z}; it then contributes
    its coefficient times the parity (-1)^(bits on Z positions).  An imaginary
    residue above tolerance means the input was not Hermitian and is reported.
    """
    a = _lift(a)
    if state.n != a.n:
        raise ValueError(f"qubit count mismatch: state n={state.n}, operator n={a.n}")
    total = 0j
    for word, coeff in a.items():
        if any(l in "XY" for l in word):
            continue
        parity = sum(b for b, l in zip(state.bits, word) if l == "Z") % 2
        total += complex(coeff) * (-1) ** parity
    if abs(total.imag) > _IMAG_TOL:
        raise ValueError(
            f"expectation has imaginary residue {total.imag:g}; operator is not Hermitian"
        )
    return float(total.real)


def identity_component(a) -> complex:
    """Coefficient of the all-identity word (equals Tr(a) / 2^n)."""
    a = _lift(a)
    return complex(a.coefficient("I" * a.n))
