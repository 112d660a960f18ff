"""Configuration space of a periodic chain whose sites hold an up spin, a down
spin or a hole.

Sites are labelled alpha = 1..N and sit at eta_alpha = exp(2j*pi*alpha/N) on the
unit circle.  A configuration is packed two bits per site into a single
integer, site alpha occupying bits 2*(alpha-1) and 2*(alpha-1)+1.  Sector bases
list their configurations in ascending packed order, so lookups are a binary
search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

HOLE = 0
UP = 1
DOWN = 2

_SYMBOLS = {HOLE: "0", UP: "u", DOWN: "d"}


class CapacityError(RuntimeError):
    """Raised when a request exceeds a configured size limit."""


@dataclass(frozen=True)
class ChainGeometry:
    n_sites: int

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites!r}")
        if self.n_sites > 31:
            # two bits per site in a uint64 word
            raise ValueError("at most 31 sites are supported")

    def site_coordinate(self, alpha: int) -> complex:
        self._check_site(alpha)
        return complex(np.exp(2j * np.pi * alpha / self.n_sites))

    @cached_property
    def coordinates(self) -> np.ndarray:
        """eta_alpha for alpha = 1..N, stored at index alpha - 1."""
        alpha = np.arange(1, self.n_sites + 1)
        return np.exp(2j * np.pi * alpha / self.n_sites)

    def _check_site(self, alpha: int) -> None:
        if not 1 <= alpha <= self.n_sites:
            raise ValueError(f"site {alpha} outside 1..{self.n_sites}")


def chord_distance_squared(geometry: ChainGeometry, alpha: int, beta: int) -> float:
    """|eta_alpha - eta_beta|^2 = 4 sin^2(pi (alpha - beta) / N)."""
    geometry._check_site(alpha)
    geometry._check_site(beta)
    if alpha == beta:
        raise ValueError("chord distance needs two distinct sites")
    return 4.0 * np.sin(np.pi * (alpha - beta) / geometry.n_sites) ** 2


# -- packing -------------------------------------------------------------------


def pack(contents) -> int:
    """Pack a sequence of site contents (index 0 is site 1) into one word."""
    word = 0
    for i, c in enumerate(contents):
        if c not in _SYMBOLS:
            raise ValueError(f"invalid site content {c!r}")
        word |= int(c) << (2 * i)
    return word


def unpack(word: int, n_sites: int) -> tuple[int, ...]:
    return tuple((int(word) >> (2 * i)) & 3 for i in range(n_sites))


def to_string(word: int, n_sites: int) -> str:
    """Human-readable form, site 1 first: 'u' up, 'd' down, '0' hole."""
    return "".join(_SYMBOLS[c] for c in unpack(word, n_sites))


@dataclass(frozen=True)
class Configuration:
    word: int
    n_sites: int

    @classmethod
    def from_contents(cls, contents) -> Configuration:
        return cls(pack(contents), len(contents))

    @property
    def contents(self) -> tuple[int, ...]:
        return unpack(self.word, self.n_sites)

    @property
    def n_up(self) -> int:
        return self.contents.count(UP)

    @property
    def n_down(self) -> int:
        return self.contents.count(DOWN)

    @property
    def n_holes(self) -> int:
        return self.contents.count(HOLE)

    def __str__(self):
        return to_string(self.word, self.n_sites)


# -- sectors -------------------------------------------------------------------


@dataclass(frozen=True)
class SectorKey:
    n_holes: int
    n_up: int

    def n_down(self, n_sites: int) -> int:
        return n_sites - self.n_holes - self.n_up

    def two_sz(self, n_sites: int) -> int:
        return self.n_up - self.n_down(n_sites)

    def validate(self, n_sites: int) -> None:
        if self.n_holes < 0 or self.n_up < 0 or self.n_holes + self.n_up > n_sites:
            raise ValueError(f"invalid sector {self} for N={n_sites}")


class SectorBasis:
    """All configurations with fixed hole number and fixed number of up spins.

    Instances are immutable after construction.  Per-configuration arrays are
    exposed read-only:

    * ``words``: sorted uint64 packed configurations.
    * ``contents``: (size, N) int8 array, column ``alpha - 1`` holds site alpha.
    """

    def __init__(self, geometry: ChainGeometry, key: SectorKey, words: np.ndarray):
        self.geometry = geometry
        self.key = key
        words = np.asarray(words, dtype=np.uint64)
        words.setflags(write=False)
        self.words = words
        n = geometry.n_sites
        shifts = np.arange(0, 2 * n, 2, dtype=np.uint64)
        contents = ((words[:, None] >> shifts[None, :]) & np.uint64(3)).astype(np.int8)
        contents.setflags(write=False)
        self.contents = contents

    @property
    def n_sites(self) -> int:
        return self.geometry.n_sites

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self):
        return self.size

    def __repr__(self):
        return (
            f"SectorBasis(N={self.n_sites}, holes={self.key.n_holes}, "
            f"up={self.key.n_up}, size={self.size})"
        )

    def configuration(self, index: int) -> Configuration:
        return Configuration(int(self.words[index]), self.n_sites)

    def index_of(self, config) -> int:
        """Position of a configuration (or packed word); ValueError if absent."""
        word = config.word if isinstance(config, Configuration) else int(config)
        i = int(np.searchsorted(self.words, np.uint64(word)))
        if i == self.size or int(self.words[i]) != word:
            raise ValueError(f"configuration {to_string(word, self.n_sites)} not in {self!r}")
        return i

    def lookup(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised index lookup.  Returns (indices, found mask)."""
        idx = np.searchsorted(self.words, words)
        idx = np.minimum(idx, self.size - 1)
        found = self.words[idx] == words
        return idx, found

    def positions(self, content: int) -> np.ndarray:
        """(size, count) array of 1-based sites holding ``content``, ascending per row."""
        mask = self.contents == content
        count = int(mask[0].sum()) if self.size else 0
        cols = np.nonzero(mask)[1]
        return cols.reshape(self.size, count) + 1

    @cached_property
    def _translation_map(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.n_sites
        top = np.uint64(2 * (n - 1))
        full = np.uint64((1 << (2 * n)) - 1)
        last = (self.words >> top) & np.uint64(3)
        shifted = ((self.words << np.uint64(2)) & full) | last
        target, found = self.lookup(shifted)
        assert found.all()
        # holes are fermionic: a hole crossing the boundary passes the other Q - 1 holes
        q = self.key.n_holes
        sign = np.ones(self.size)
        if q > 1 and (q - 1) % 2:
            sign[last == np.uint64(HOLE)] = -1.0
        target.setflags(write=False)
        sign.setflags(write=False)
        return target, sign


def sector_size(n_sites: int, key: SectorKey) -> int:
    return comb(n_sites, key.n_holes) * comb(n_sites - key.n_holes, key.n_up)


def enumerate_sector(geometry: ChainGeometry, key: SectorKey) -> SectorBasis:
    """Build the canonically ordered basis of one (holes, up spins) sector."""
    n = geometry.n_sites
    key.validate(n)
    words = []
    sites = range(n)
    down_word = pack([DOWN] * n)
    for holes in itertools.combinations(sites, key.n_holes):
        base = down_word
        for h in holes:
            base &= ~(3 << (2 * h))
        rest = [s for s in sites if s not in holes]
        for ups in itertools.combinations(rest, key.n_up):
            w = base
            for u in ups:
                # DOWN (0b10) -> UP (0b01)
                w ^= 3 << (2 * u)
            words.append(w)
    words = np.array(sorted(words), dtype=np.uint64)
    return SectorBasis(geometry, key, words)


def all_sector_keys(n_sites: int):
    for q in range(n_sites + 1):
        for up in range(n_sites - q + 1):
            yield SectorKey(q, up)


# -- state vectors -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    sector: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.sector.size,):
            raise ValueError(
                f"amplitude vector of shape {amps.shape} does not fit {self.sector!r}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        return StateVector(self.sector, self.amplitudes / self.norm)

    def vdot(self, other: StateVector) -> complex:
        if other.sector is not self.sector:
            raise ValueError("states belong to different sectors")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other):
        if other.sector is not self.sector:
            raise ValueError("states belong to different sectors")
        return StateVector(self.sector, self.amplitudes + other.amplitudes)

    def __sub__(self, other):
        if other.sector is not self.sector:
            raise ValueError("states belong to different sectors")
        return StateVector(self.sector, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar):
        return StateVector(self.sector, self.amplitudes * scalar)

    __rmul__ = __mul__


def translation_operator(sector: SectorBasis) -> tuple[np.ndarray, np.ndarray]:
    """(target index, sign) arrays describing T on ``sector``."""
    return sector._translation_map


def apply_translation(state: StateVector) -> StateVector:
    """Shift every site content from alpha to alpha + 1 (site N wraps to 1).

    On configurations without holes, or with a single hole, this is a pure
    permutation.  With Q >= 2 holes a hole wrapping from site N to site 1 picks
    up (-1)^(Q-1), the sign of moving a fermion past the other Q - 1 holes.
    """
    target, sign = translation_operator(state.sector)
    out = np.empty_like(state.amplitudes)
    out[target] = sign * state.amplitudes
    return StateVector(state.sector, out)


def translate_columns(sector: SectorBasis, vectors: np.ndarray) -> np.ndarray:
    """Apply T to every column of a (size, k) array."""
    target, sign = translation_operator(sector)
    out = np.empty_like(vectors)
    out[target] = sign[:, None] * vectors
    return out
