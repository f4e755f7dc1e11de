#!/usr/bin/env python3
"""
================================================================
🔤 SYMBOLIC LAYER - Words, cylinder mass, choice functions
Alphabets A_n, the cylinder measure, reproducible random choice
functions, and detection / planting of (R1)/(R2) occurrences
================================================================

Seeded choice functions are a keyed SHA-256 PRF. Byte layout:

    b"ftl-choice-v1" || seed (8 bytes, big endian)
                     || n (2 bytes, big endian)
                     || each letter (2 bytes, big endian)

and the value is 1 + (first digest byte & 1). The empty word hashes
the header alone.
"""

import hashlib
import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from workbench_errors import BudgetExceededError, DomainError, PreconditionError

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

PRF_TAG = b"ftl-choice-v1"
DEFAULT_WORD_BUDGET = 2_000_000


@dataclass(frozen=True)
class Alphabet:
    """Letters 1..5n-6; letters above 4n-4 are the interior letters"""
    n: int

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise DomainError(f"n must be an even integer >= 4, got {self.n}")

    @property
    def size(self) -> int:
        return 5 * self.n - 6

    @property
    def ring_size(self) -> int:
        return 4 * self.n - 4

    def letters(self) -> range:
        return range(1, self.size + 1)

    def is_interior(self, letter: int) -> bool:
        return letter > self.ring_size

    def validate_word(self, word: Sequence[int]) -> Word:
        word = tuple(int(letter) for letter in word)
        for letter in word:
            if not 1 <= letter <= self.size:
                raise DomainError(f"letter {letter} outside 1..{self.size}")
        return word

    def words(self, length: int) -> Iterator[Word]:
        return itertools.product(self.letters(), repeat=length)

    def count(self, length: int) -> int:
        return self.size ** length


def cylinder_mass(alphabet: Alphabet, word: Sequence[int]) -> Fraction:
    """ν_n of the cylinder of w: (5n-6)^{-|w|}"""
    alphabet.validate_word(word)
    return Fraction(1, alphabet.size ** len(word))


# ----------------------------------------------------------------------
# Choice functions
# ----------------------------------------------------------------------

class ChoiceFunction(ABC):
    """Pure map from finite words to the model index {1, 2}"""
    kind: str = "abstract"

    @abstractmethod
    def __call__(self, word: Word) -> int:
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


class ConstantChoice(ChoiceFunction):
    kind = "constant"

    def __init__(self, value: int):
        if value not in (1, 2):
            raise DomainError("choice values are 1 or 2")
        self.value = value

    def __call__(self, word: Word) -> int:
        return self.value

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "value": self.value}


class DepthChoice(ChoiceFunction):
    """Model 1 on words shorter than `model_one_depth`, model 2 below"""
    kind = "depth"

    def __init__(self, model_one_depth: int):
        if model_one_depth < 0:
            raise DomainError("depth must be nonnegative")
        self.model_one_depth = model_one_depth

    def __call__(self, word: Word) -> int:
        return 1 if len(word) < self.model_one_depth else 2

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "model_one_depth": self.model_one_depth}


class TableChoice(ChoiceFunction):
    kind = "table"

    def __init__(self, table: Dict[Word, int], default: int = 2):
        for word, value in table.items():
            if value not in (1, 2):
                raise DomainError(f"table value for {word} must be 1 or 2")
        if default not in (1, 2):
            raise DomainError("default must be 1 or 2")
        self.table = {tuple(w): v for w, v in table.items()}
        self.default = default

    def __call__(self, word: Word) -> int:
        return self.table.get(tuple(word), self.default)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "default": self.default,
            "table": [[list(w), v] for w, v in sorted(self.table.items())],
        }


class SeededChoice(ChoiceFunction):
    """Fair coin per word from the pinned SHA-256 PRF"""
    kind = "prf"

    def __init__(self, alphabet: Alphabet, seed: int):
        if not 0 <= seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        self.alphabet = alphabet
        self.seed = seed
        self._header = PRF_TAG + seed.to_bytes(8, 'big') + alphabet.n.to_bytes(2, 'big')

    def __call__(self, word: Word) -> int:
        payload = b"".join(letter.to_bytes(2, 'big') for letter in word)
        digest = hashlib.sha256(self._header + payload).digest()
        return 1 + (digest[0] & 1)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self.alphabet.n, "seed": self.seed,
                "algorithm": "sha256/" + PRF_TAG.decode()}


@dataclass(frozen=True)
class Patch:
    """
    Forced values around one occurrence.

    Words extending `collar` (= w(ℓ-N)) shorter than |collar|+2N+k are
    decided here: 1 on extensions of `block` (= w(ℓ)) of lengths
    ℓ..ℓ+k-1, 2 elsewhere.
    """
    collar: Word
    block: Word
    k: int

    @property
    def N(self) -> int:
        return len(self.block) - len(self.collar)

    @property
    def window_end(self) -> int:
        return len(self.collar) + 2 * self.N + self.k

    def value(self, word: Word) -> Optional[int]:
        if len(word) >= self.window_end or word[:len(self.collar)] != self.collar:
            return None
        ell = len(self.block)
        if ell <= len(word) <= ell + self.k - 1 and word[:ell] == self.block:
            return 1
        return 2

    def to_dict(self) -> Dict[str, Any]:
        return {"collar": list(self.collar), "block": list(self.block), "k": self.k}


class PlantedChoice(ChoiceFunction):
    """Base choice function overlaid with patches (patches win)"""
    kind = "planted"

    def __init__(self, base: ChoiceFunction, patches: Sequence[Patch]):
        self.base = base
        self.patches = tuple(patches)

    def __call__(self, word: Word) -> int:
        for patch in self.patches:
            forced = patch.value(word)
            if forced is not None:
                return forced
        return self.base(word)

    def certifies(self, patch: Patch) -> bool:
        """`patch` is planted here and no earlier patch decides any word of its window"""
        if patch not in self.patches:
            return False
        for other in self.patches[:self.patches.index(patch)]:
            short, long_ = sorted((other.collar, patch.collar), key=len)
            comparable = long_[:len(short)] == short
            if comparable and max(len(other.collar), len(patch.collar)) < min(other.window_end, patch.window_end):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "base": self.base.to_dict(),
                "patches": [p.to_dict() for p in self.patches]}


class ShiftedChoice(ChoiceFunction):
    """η_u(v) = η(uv): the choice function of the sub-carpet under u"""
    kind = "shifted"

    def __init__(self, base: ChoiceFunction, prefix: Sequence[int]):
        self.base = base
        self.prefix = tuple(prefix)

    def __call__(self, word: Word) -> int:
        return self.base(self.prefix + tuple(word))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "prefix": list(self.prefix), "base": self.base.to_dict()}


def choice_from_dict(data: Dict[str, Any]) -> ChoiceFunction:
    kind = data.get("kind")
    if kind == "constant":
        return ConstantChoice(int(data["value"]))
    if kind == "depth":
        return DepthChoice(int(data["model_one_depth"]))
    if kind == "table":
        return TableChoice({tuple(w): int(v) for w, v in data["table"]}, int(data.get("default", 2)))
    if kind == "prf":
        return SeededChoice(Alphabet(int(data["n"])), int(data["seed"]))
    if kind == "planted":
        patches = [Patch(tuple(p["collar"]), tuple(p["block"]), int(p["k"])) for p in data["patches"]]
        return PlantedChoice(choice_from_dict(data["base"]), patches)
    if kind == "shifted":
        return ShiftedChoice(choice_from_dict(data["base"]), data["prefix"])
    raise DomainError(f"unknown choice function kind {kind!r}")


def sample_choice(alphabet: Alphabet, seed: int) -> ChoiceFunction:
    return SeededChoice(alphabet, seed)


def collar_choice(N: int, k: int, block: Sequence[int]) -> ChoiceFunction:
    """Model 2 everywhere except a k-level model-1 block under `block` (|block| = N)"""
    block = tuple(block)
    if len(block) != N:
        raise DomainError("collar block must have length N")
    return PlantedChoice(ConstantChoice(2), [Patch((), block, k)])


# ----------------------------------------------------------------------
# (R1)/(R2) occurrences
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Occurrence:
    ell: int
    N: int
    k: int

    @property
    def window(self) -> Tuple[int, int]:
        return self.ell - self.N, self.ell + self.N + self.k

    def to_dict(self) -> Dict[str, int]:
        return {"ell": self.ell, "N": self.N, "k": self.k}


@dataclass(frozen=True)
class PlantSpec:
    w_prefix: Word
    occurrences: Tuple[Occurrence, ...] = field(default_factory=tuple)

    def validate(self, alphabet: Alphabet) -> None:
        prefix = alphabet.validate_word(self.w_prefix)
        for occ in self.occurrences:
            if occ.N < 1 or occ.k < 0:
                raise PreconditionError(f"occurrence {occ} needs N >= 1 and k >= 0")
            if occ.ell - occ.N < 0:
                raise PreconditionError(f"occurrence {occ}: ell - N must be >= 0")
            if len(prefix) < occ.ell + occ.N + occ.k:
                raise PreconditionError(
                    f"occurrence {occ}: prefix of length {len(prefix)} does not cover ell+N+k")
            if not alphabet.is_interior(prefix[occ.ell - occ.N]):
                raise PreconditionError(
                    f"occurrence {occ}: letter {occ.ell - occ.N + 1} must exceed {alphabet.ring_size}")
        ordered = sorted(self.occurrences, key=lambda o: o.window)
        for left, right in zip(ordered, ordered[1:]):
            if left.window[1] >= right.window[0]:
                raise PreconditionError(f"occurrence windows {left.window} and {right.window} overlap")

    def patches(self) -> List[Patch]:
        return [Patch(self.w_prefix[:o.ell - o.N], self.w_prefix[:o.ell], o.k)
                for o in self.occurrences]

    def to_dict(self) -> Dict[str, Any]:
        return {"w_prefix": list(self.w_prefix),
                "occurrences": [o.to_dict() for o in self.occurrences]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PlantSpec':
        try:
            occ = tuple(Occurrence(int(o["ell"]), int(o["N"]), int(o["k"])) for o in data["occurrences"])
            return cls(tuple(int(x) for x in data["w_prefix"]), occ)
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed plant spec: {e}")


def patch_size(alphabet: Alphabet, N: int, k: int) -> int:
    """|B_m| = ((5n-6)^{2N+k} - 1)/(5n-7)"""
    return (alphabet.size ** (2 * N + k) - 1) // (alphabet.size - 1)


def plant_R1R2(alphabet: Alphabet, base_seed: int, spec: PlantSpec) -> PlantedChoice:
    spec.validate(alphabet)
    planted = PlantedChoice(SeededChoice(alphabet, base_seed), spec.patches())
    logger.info(f"🌱 Planted {len(spec.occurrences)} occurrence(s) over PRF seed {base_seed}")
    return planted


@dataclass
class R1R2Verdict:
    ok: bool
    witness: Optional[Word] = None
    reason: str = ""
    words_checked: int = 0
    method: str = "enumeration"

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "witness": list(self.witness) if self.witness is not None else None,
                "reason": self.reason, "words_checked": self.words_checked, "method": self.method}


def check_R1R2(eta: ChoiceFunction, alphabet: Alphabet, w_prefix: Sequence[int],
               N: int, k: int, ell: int, budget: int = DEFAULT_WORD_BUDGET) -> R1R2Verdict:
    """
    (R1)/(R2) at (ℓ, N, k); witness is the first violating word.

    A ring collar letter fails (R2) outright (method "collar"). A
    PlantedChoice that planted this very patch is accepted from its
    certificate without enumerating (method "certificate"). Otherwise
    every word of the patch is enumerated within `budget`.
    """
    prefix = alphabet.validate_word(w_prefix)
    if N < 1 or k < 0:
        raise PreconditionError("need N >= 1 and k >= 0")
    if ell - N < 0:
        raise PreconditionError(f"ell - N = {ell - N} < 0")
    if len(prefix) < ell + N + k:
        raise PreconditionError(f"prefix length {len(prefix)} does not cover ell+N+k = {ell + N + k}")

    if not alphabet.is_interior(prefix[ell - N]):
        return R1R2Verdict(False, prefix[:ell - N + 1], "R2: collar letter is a ring letter", method="collar")

    patch = Patch(prefix[:ell - N], prefix[:ell], k)
    if isinstance(eta, PlantedChoice) and eta.certifies(patch):
        return R1R2Verdict(True, None, "R1 holds by construction of the planted patch", method="certificate")

    required = patch_size(alphabet, N, k)
    if required > budget:
        raise BudgetExceededError("R1 enumeration", required, budget)

    checked = 0
    for extra in range(2 * N + k):
        for tail in alphabet.words(extra):
            word = patch.collar + tail
            checked += 1
            if eta(word) != patch.value(word):
                return R1R2Verdict(False, word, "R1: forced value not met", checked)
    return R1R2Verdict(True, None, "", checked)


def find_ell(eta: ChoiceFunction, alphabet: Alphabet, w_prefix: Sequence[int],
             N: int, k: int, ell_max: int, budget: int = DEFAULT_WORD_BUDGET) -> Optional[int]:
    """First ℓ in [N, ell_max] at which (R1)/(R2) hold"""
    for ell in range(N, ell_max + 1):
        if ell + N + k > len(w_prefix):
            break
        if check_R1R2(eta, alphabet, w_prefix, N, k, ell, budget).ok:
            logger.info(f"✅ (R1)/(R2) found at ell={ell} (N={N}, k={k})")
            return ell
    return None
