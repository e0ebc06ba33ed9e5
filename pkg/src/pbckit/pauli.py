"""Signed Pauli operators on bit-packed symplectic rows, plus the measured-basis tracker.

Conventions, chosen once and used everywhere:

* An operator on ``width`` qubits is ``i**phase * prod_j X_j**x_j * Z_j**z_j``
  with the X factor written to the left of the Z factor on every qubit.
  ``x`` and ``z`` are Python ints used as bitsets (bit j = qubit j), ``phase``
  is mod 4.  In this encoding ``Y = i * X * Z``, so the single-qubit Y is
  ``(x=1, z=1, phase=1)``.
* An operator is Hermitian iff ``phase + popcount(x & z)`` is even.
* Labels read left to right as qubit 0, 1, 2, ...: ``"+XIZ"`` is X on qubit 0
  and Z on qubit 2.  The prefix is one of ``+``, ``-``, ``+i``, ``-i``
  (bare ``i`` is accepted on input).

Products and conjugations reduce to XOR, AND and popcount on the bitsets;
the phase bookkeeping lives in this module and nowhere else.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InternalInvariantError, PauliError

_PREFIX_OF_VALUE = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_VALUE_OF_PREFIX = {"+": 0, "": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def symplectic_parity(x1: int, z1: int, x2: int, z2: int) -> int:
    """1 if the two (x, z) rows anticommute, else 0."""
    return ((x1 & z2).bit_count() ^ (z1 & x2).bit_count()) & 1


@dataclass(frozen=True, slots=True)
class PauliOperator:
    width: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.width < 0:
            raise PauliError(f"negative width {self.width}")
        mask = (1 << self.width) - 1
        if self.x & ~mask or self.z & ~mask:
            raise PauliError("x/z bits outside operator width")
        if not 0 <= self.phase <= 3:
            raise PauliError(f"phase {self.phase} not in 0..3")

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, width: int) -> "PauliOperator":
        return cls(width, 0, 0, 0)

    @classmethod
    def single(cls, width: int, qubit: int, letter: str, negate: bool = False) -> "PauliOperator":
        """One non-trivial site; ``letter`` in {X, Y, Z}."""
        if not 0 <= qubit < width:
            raise PauliError(f"qubit {qubit} outside width {width}")
        if letter not in ("X", "Y", "Z"):
            raise PauliError(f"letter must be X, Y or Z, got {letter!r}")
        xb, zb = _LETTER_BITS[letter]
        phase = (xb & zb) + (2 if negate else 0)
        return cls(width, xb << qubit, zb << qubit, phase & 3)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse ``"+XIZY"`` style text (see module docstring for orientation)."""
        body_start = 0
        while body_start < len(label) and label[body_start] not in "IXYZ":
            body_start += 1
        prefix, body = label[:body_start], label[body_start:]
        if prefix not in _VALUE_OF_PREFIX:
            raise PauliError(f"bad sign prefix {prefix!r} in {label!r}")
        if not body:
            raise PauliError(f"empty Pauli body in {label!r}")
        x = z = 0
        for j, ch in enumerate(body):
            if ch not in _LETTER_BITS:
                raise PauliError(f"bad letter {ch!r} in {label!r}")
            xb, zb = _LETTER_BITS[ch]
            x |= xb << j
            z |= zb << j
        y_count = (x & z).bit_count()
        return cls(len(body), x, z, (_VALUE_OF_PREFIX[prefix] + y_count) & 3)

    # -- presentation ---------------------------------------------------

    def to_label(self) -> str:
        y_count = (self.x & self.z).bit_count()
        prefix = _PREFIX_OF_VALUE[(self.phase + 3 * y_count) & 3]
        letters = [
            "IXZY"[((self.x >> j) & 1) + 2 * ((self.z >> j) & 1)]
            for j in range(self.width)
        ]
        return prefix + "".join(letters)

    def __str__(self) -> str:
        return self.to_label()

    # -- structure ------------------------------------------------------

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        occ = self.x | self.z
        return tuple(j for j in range(self.width) if (occ >> j) & 1)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_hermitian(self) -> bool:
        return ((self.phase + (self.x & self.z).bit_count()) & 1) == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian operator (its tensor-of-sigmas sign)."""
        if not self.is_hermitian:
            raise PauliError(f"{self.to_label()} has no real sign")
        y_count = (self.x & self.z).bit_count()
        return -1 if (self.phase + 3 * y_count) & 3 == 2 else 1

    # -- algebra --------------------------------------------------------

    def commutes(self, other: "PauliOperator") -> bool:
        self._check_width(other)
        return symplectic_parity(self.x, self.z, other.x, other.z) == 0

    def multiply(self, other: "PauliOperator") -> "PauliOperator":
        """Matrix product self * other."""
        self._check_width(other)
        # Reordering other's X factors past self's Z factors gives one -1
        # per crossing; ZX = -XZ contributes i^2 each.
        phase = (self.phase + other.phase + 2 * (self.z & other.x).bit_count()) & 3
        return PauliOperator(self.width, self.x ^ other.x, self.z ^ other.z, phase)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return self.multiply(other)

    def negated(self) -> "PauliOperator":
        return PauliOperator(self.width, self.x, self.z, (self.phase + 2) & 3)

    def conjugate_by_gate(self, kind: str, *qubits: int) -> "PauliOperator":
        """Return g' * self * g for the named Clifford gate g.

        This is the backward (Heisenberg) direction used when a measurement is
        pulled leftward through a circuit.  Supported kinds: h, s, x, z, cx.
        """
        for q in qubits:
            if not 0 <= q < self.width:
                raise PauliError(f"qubit {q} outside width {self.width}")
        x, z, phase = self.x, self.z, self.phase
        if kind == "h":
            (q,) = qubits
            bit = 1 << q
            xb, zb = x & bit, z & bit
            if xb and zb:
                phase += 2  # H Y H = -Y
            x ^= xb ^ zb
            z ^= xb ^ zb
        elif kind == "s":
            (q,) = qubits
            bit = 1 << q
            if x & bit:
                z ^= bit
                phase += 3  # S'XS = -Y (phase 3), S'YS = X (1+3 = 0 mod 4)
        elif kind == "x":
            (q,) = qubits
            if z & (1 << q):
                phase += 2
        elif kind == "z":
            (q,) = qubits
            if x & (1 << q):
                phase += 2
        elif kind == "cx":
            c, t = qubits
            if c == t:
                raise PauliError("cx control equals target")
            if x & (1 << c):
                x ^= 1 << t
            if z & (1 << t):
                z ^= 1 << c
        else:
            raise PauliError(f"cannot conjugate by gate kind {kind!r}")
        return PauliOperator(self.width, x, z, phase & 3)

    def conjugate_by_reflection(self, reflection: "Reflection") -> "PauliOperator":
        """Return V * self * V for the (Hermitian) reflection V."""
        axis, incoming = reflection.axis, reflection.incoming
        commutes_axis = self.commutes(axis)
        commutes_incoming = self.commutes(incoming)
        if commutes_axis and commutes_incoming:
            return self
        if not commutes_axis and not commutes_incoming:
            return self.negated()
        ab = (reflection.axis_outcome ^ reflection.toss) & 1
        if commutes_axis:
            # Anticommutes with the incoming operator only: ab * W * Q * P.
            out = self.multiply(axis).multiply(incoming)
        else:
            # Anticommutes with the axis only: ab * W * P * Q.
            out = self.multiply(incoming).multiply(axis)
        return out.negated() if ab else out

    # -- helpers --------------------------------------------------------

    def _check_width(self, other: "PauliOperator"):
        if self.width != other.width:
            raise PauliError(f"width mismatch: {self.width} vs {other.width}")


@dataclass(frozen=True, slots=True)
class Reflection:
    """V = ((-1)**axis_outcome * axis + (-1)**toss * incoming) / sqrt(2).

    ``axis`` is the tracked basis row the measured operator anticommuted
    with, ``incoming`` the fully conjugated measured operator itself,
    ``axis_outcome`` that row's recorded outcome and ``toss`` the fresh coin
    assigned to the new measurement.  Both operators must be Hermitian and
    anticommute, which makes V a Hermitian unitary.
    """

    axis: PauliOperator
    incoming: PauliOperator
    axis_outcome: int
    toss: int

    def __post_init__(self):
        if not (self.axis.is_hermitian and self.incoming.is_hermitian):
            raise PauliError("reflection parts must be Hermitian")
        if self.axis.commutes(self.incoming):
            raise PauliError("reflection parts must anticommute")
        if self.axis_outcome not in (0, 1) or self.toss not in (0, 1):
            raise PauliError("reflection outcomes must be bits")


class Origin(enum.Enum):
    """Where a tracked basis row came from."""

    DUMMY = "dummy"
    OVERRIDE = "override"
    MEASURED = "measured"


@dataclass(frozen=True, slots=True)
class Anticommuting:
    """Fails to commute with the tracked row at this index (lowest wins)."""

    row_index: int


@dataclass(frozen=True, slots=True)
class Dependent:
    """Equals (-1)**sign times the product of the indexed rows."""

    row_indices: tuple[int, ...]
    sign: int


@dataclass(frozen=True, slots=True)
class Independent:
    """Commutes with every row and is outside their span."""


Classification = Anticommuting | Dependent | Independent


class BasisTracker:
    """Growing list of commuting measured rows with incremental GF(2) elimination.

    Each inserted row keeps its outcome bit and origin tag.  ``classify``
    answers, for a candidate operator: does it anticommute with some row
    (reported with the lowest row index), is it a signed product of rows
    (reported with the exact index set and sign), or is it independent.

    The elimination state stores one reduced vector per row together with a
    mask of the original row indices that built it, so dependency sets come
    out of the reduction for free.
    """

    def __init__(self, width: int):
        if width <= 0:
            raise PauliError(f"tracker width must be positive, got {width}")
        self.width = width
        self._rows: list[PauliOperator] = []
        self._outcomes: list[int] = []
        self._origins: list[Origin] = []
        self._pivots: dict[int, int] = {}  # pivot bit -> elimination entry
        self._evecs: list[int] = []
        self._emasks: list[int] = []

    def __len__(self) -> int:
        return len(self._rows)

    def row(self, index: int) -> PauliOperator:
        return self._rows[index]

    def outcome(self, index: int) -> int:
        return self._outcomes[index]

    def origin(self, index: int) -> Origin:
        return self._origins[index]

    @property
    def rows(self) -> tuple[PauliOperator, ...]:
        return tuple(self._rows)

    def _symplectic_vector(self, p: PauliOperator) -> int:
        return p.x | (p.z << self.width)

    def _reduce(self, p: PauliOperator) -> tuple[int, int]:
        """Eliminate known pivots from p's row vector; return (residue, mask)."""
        vec = self._symplectic_vector(p)
        mask = 0
        while vec:
            low = vec & -vec
            entry = self._pivots.get(low)
            if entry is None:
                break
            vec ^= self._evecs[entry]
            mask ^= self._emasks[entry]
        return vec, mask

    def classify(self, p: PauliOperator) -> Classification:
        if p.width != self.width:
            raise PauliError(f"operator width {p.width} != tracker width {self.width}")
        if not p.is_hermitian:
            raise PauliError(f"cannot classify non-Hermitian {p.to_label()}")
        if p.is_identity:
            raise PauliError("cannot classify the identity")
        for i, row in enumerate(self._rows):
            if not p.commutes(row):
                return Anticommuting(i)
        vec, mask = self._reduce(p)
        if vec:
            return Independent()
        indices = tuple(i for i in range(len(self._rows)) if (mask >> i) & 1)
        product = PauliOperator.identity(self.width)
        for i in indices:
            product = product.multiply(self._rows[i])
        delta = (product.phase - p.phase) & 3
        if delta & 1 or product.x != p.x or product.z != p.z:
            raise InternalInvariantError(
                f"dependency reconstruction mismatch for {p.to_label()}"
            )
        return Dependent(indices, delta >> 1)

    def insert(self, p: PauliOperator, outcome: int, origin: Origin) -> int:
        """Append an independent commuting row; returns its index."""
        result = self.classify(p)
        if not isinstance(result, Independent):
            raise PauliError(f"row {p.to_label()} is not independent: {result}")
        if outcome not in (0, 1):
            raise PauliError("outcome must be a bit")
        index = len(self._rows)
        vec, mask = self._reduce(p)
        self._pivots[vec & -vec] = len(self._evecs)
        self._evecs.append(vec)
        self._emasks.append(mask | (1 << index))
        self._rows.append(p)
        self._outcomes.append(outcome)
        self._origins.append(origin)
        return index
