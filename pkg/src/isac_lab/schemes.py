"""Named index-distribution schemes and the closed-form range/velocity CRBs.

The closed forms expose the inverse proportionality between the bounds and
the variance of the assigned subcarrier / sensing-symbol indices:

    crb_range    = c^2 sigma^2 / (8  |beta|^2 pi^2 G_k N_k  df^2       var_zeta)
    crb_velocity = c^2 sigma^2 / (32 |beta|^2 pi^2 G_k N_k (fc*Ts)^2   var_psi)

``verify_extremality`` brute-forces every index subset of a pool to certify
that the edge-first pattern attains the maximum variance and a consecutive
(subband) run attains the minimum.
"""

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import CapacityError, ConfigError, DegeneracyError
from .model import SPEED_OF_LIGHT, index_variance

SUBBAND = "subband"
INTERLEAVED = "interleaved"
EDGE_FIRST = "edge-first"
GENERALIZED = "generalized"

_TAGS = (SUBBAND, INTERLEAVED, EDGE_FIRST, GENERALIZED)


@dataclass(frozen=True)
class SchemeKind:
    """A named distribution scheme; ``generalized`` carries an RNG seed so
    every "other" scheme is reproducible."""

    tag: str
    seed: int | None = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ConfigError(f"unknown scheme tag {self.tag!r}; expected one of {_TAGS}")
        if self.tag == GENERALIZED and self.seed is None:
            raise ConfigError("generalized scheme requires a seed")

    @classmethod
    def parse(cls, text: str) -> "SchemeKind":
        """Parse CLI spellings: subband | interleaved | edge-first | generalized:<seed>."""
        name, _, arg = text.partition(":")
        name = name.strip().lower().replace("_", "-")
        if name == GENERALIZED:
            if not arg:
                raise ConfigError("generalized scheme needs a seed: generalized:<seed>")
            return cls(GENERALIZED, int(arg))
        return cls(name)


# Fixed single-UE scheme instances (16 indices from a 48 pool) used by the
# figure-reproduction experiments.
TABLE1_SINGLE_UE: dict[str, tuple[int, ...]] = {
    SUBBAND: tuple(range(1, 17)),
    INTERLEAVED: tuple(range(1, 47, 3)),
    EDGE_FIRST: tuple(range(1, 9)) + tuple(range(41, 49)),
}

# Fixed three-UE "generalized" partition of a 48 pool used by the multi-UE
# figure-reproduction experiments.
TABLE2_GENERALIZED: tuple[tuple[int, ...], ...] = (
    (1, 2, 5, 8, 9, 13, 16, 17, 19, 25, 26, 29, 34, 36, 38, 41),
    (3, 6, 7, 11, 14, 15, 20, 23, 27, 31, 32, 35, 37, 43, 46, 48),
    (4, 10, 12, 18, 21, 22, 24, 28, 30, 33, 39, 40, 42, 44, 45, 47),
)


def generate_scheme(kind: SchemeKind, pool_size: int, count: int,
                    ue_index: int, n_ues: int) -> tuple[int, ...]:
    """Generate the (sorted, 1-based) index list of one UE under a scheme.

    subband     : consecutive block offset by (ue_index-1)*count
    interleaved : every n_ues-th index starting at ue_index
    edge-first  : ceil(count/2) lowest plus floor(count/2) highest indices of
                  the remaining band, nested so UE 1 takes the outermost band
    generalized : seeded uniform draw without replacement, disjoint across UEs
    """
    if count < 1 or pool_size < 1:
        raise CapacityError("count and pool_size must be >= 1")
    if count > pool_size:
        raise CapacityError(f"count {count} exceeds pool size {pool_size}")
    if not (1 <= ue_index <= n_ues):
        raise ConfigError(f"ue_index {ue_index} out of range 1..{n_ues}")

    if kind.tag == SUBBAND:
        offset = (ue_index - 1) * count
        if offset + count > pool_size:
            raise CapacityError(
                f"subband block for UE {ue_index} exceeds pool ({offset + count} > {pool_size})")
        return tuple(range(offset + 1, offset + count + 1))

    if kind.tag == INTERLEAVED:
        if count * n_ues > pool_size:
            raise CapacityError(
                f"interleaved needs count*n_ues <= pool ({count * n_ues} > {pool_size})")
        return tuple(ue_index + n_ues * i for i in range(count))

    if kind.tag == EDGE_FIRST:
        n_low = (count + 1) // 2  # odd counts put the extra index on the low side
        n_high = count // 2
        if n_ues * count > pool_size:
            raise CapacityError(
                f"edge-first nesting needs n_ues*count <= pool ({n_ues * count} > {pool_size})")
        low = range((ue_index - 1) * n_low + 1, ue_index * n_low + 1)
        high = range(pool_size - ue_index * n_high + 1,
                     pool_size - (ue_index - 1) * n_high + 1)
        return tuple(low) + tuple(high)

    # generalized: one seeded permutation of the pool, sliced per UE, so the
    # K subsets are disjoint and each reproducible from (seed, ue_index).
    import numpy as np

    if count * n_ues > pool_size:
        raise CapacityError(
            f"generalized needs count*n_ues <= pool ({count * n_ues} > {pool_size})")
    perm = np.random.default_rng(kind.seed).permutation(pool_size) + 1
    block = perm[(ue_index - 1) * count: ue_index * count]
    return tuple(sorted(int(i) for i in block))


@dataclass(frozen=True)
class CrbInputs:
    """Scalar inputs of the closed-form CRBs."""

    beta_power: float
    noise_power: float
    n_k: int
    g_k: int
    subcarrier_spacing: float
    carrier_freq: float
    symbol_duration: float
    zeta_variance: float
    psi_variance: float

    def __post_init__(self):
        for name in ("beta_power", "noise_power", "subcarrier_spacing",
                     "carrier_freq", "symbol_duration"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.n_k < 1 or self.g_k < 1:
            raise ConfigError("n_k and g_k must be >= 1")
        if self.zeta_variance < 0 or self.psi_variance < 0:
            raise ConfigError("index variances must be nonnegative")


def crb_range(inputs: CrbInputs) -> float:
    """Range estimation variance bound in m^2."""
    if inputs.zeta_variance <= 0:
        raise DegeneracyError("zeta_variance must be > 0 (bound diverges)")
    num = SPEED_OF_LIGHT ** 2 * inputs.noise_power
    den = (8 * inputs.beta_power * math.pi ** 2 * inputs.g_k * inputs.n_k
           * inputs.subcarrier_spacing ** 2)
    return num / den / inputs.zeta_variance


def crb_velocity(inputs: CrbInputs) -> float:
    """Velocity estimation variance bound in (m/s)^2."""
    if inputs.psi_variance <= 0:
        raise DegeneracyError("psi_variance must be > 0 (bound diverges)")
    num = SPEED_OF_LIGHT ** 2 * inputs.noise_power
    den = (32 * inputs.beta_power * math.pi ** 2 * inputs.g_k * inputs.n_k
           * (inputs.carrier_freq * inputs.symbol_duration) ** 2)
    return num / den / inputs.psi_variance


@dataclass(frozen=True)
class ExtremalityReport:
    """Result of exhaustively scanning all C(pool, count) index subsets."""

    pool_size: int
    count: int
    n_subsets: int
    max_variance: float
    min_variance: float
    argmax: tuple[tuple[int, ...], ...]
    argmin: tuple[tuple[int, ...], ...]
    edge_first_is_max: bool
    subband_is_min: bool


def verify_extremality(pool_size: int, count: int,
                       max_subsets: int = 10_000_000) -> ExtremalityReport:
    """Certify edge-first = argmax and subband = argmin of index variance.

    Enumerates every subset, so it refuses instances with more than
    ``max_subsets`` combinations.
    """
    if count < 1 or count > pool_size:
        raise CapacityError("need 1 <= count <= pool_size")
    n_subsets = math.comb(pool_size, count)
    if n_subsets > max_subsets:
        raise CapacityError(
            f"C({pool_size},{count}) = {n_subsets} exceeds the enumeration "
            f"guard {max_subsets}; use sampling instead")

    best_hi = -1.0
    best_lo = math.inf
    argmax: list[tuple[int, ...]] = []
    argmin: list[tuple[int, ...]] = []
    for subset in combinations(range(1, pool_size + 1), count):
        v = index_variance(subset)
        if v > best_hi + 1e-12:
            best_hi, argmax = v, [subset]
        elif abs(v - best_hi) <= 1e-12:
            argmax.append(subset)
        if v < best_lo - 1e-12:
            best_lo, argmin = v, [subset]
        elif abs(v - best_lo) <= 1e-12:
            argmin.append(subset)

    edge = generate_scheme(SchemeKind(EDGE_FIRST), pool_size, count, 1, 1)
    sub = generate_scheme(SchemeKind(SUBBAND), pool_size, count, 1, 1)
    return ExtremalityReport(
        pool_size=pool_size,
        count=count,
        n_subsets=n_subsets,
        max_variance=best_hi,
        min_variance=best_lo,
        argmax=tuple(argmax),
        argmin=tuple(argmin),
        edge_first_is_max=tuple(sorted(edge)) in argmax,
        subband_is_min=tuple(sorted(sub)) in argmin,
    )
