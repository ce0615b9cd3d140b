"""Languages of directive sequences: factors, complexity and Toeplitz evidence."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import LanguageError
from .morphisms import RUN_PATTERN, DirectiveSequence, Word

logger = logging.getLogger("sadic-builder")

# Multipliers in the coarse bounds 3|A_{i+2}|^3 n (regime I) and 5|A_{i+3}|^3 n (regime J).
COARSE_REGIME_I = 3
COARSE_REGIME_J = 5


@dataclass(frozen=True)
class ComplexityProfile:
    """p(1), ..., p(N) with how they were obtained."""

    values: Tuple[int, ...]
    level: Optional[int] = None
    stabilized: bool = True
    partial: bool = False

    def __post_init__(self):
        if not self.values:
            raise LanguageError("a complexity profile needs at least p(1)")

    @property
    def n_max(self) -> int:
        return len(self.values)

    def p(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise LanguageError(f"p({n}) outside the computed range 1..{self.n_max}")
        return self.values[n - 1]

    def items(self):
        return enumerate(self.values, start=1)


@dataclass(frozen=True)
class FactorSet:
    words: FrozenSet[Word]
    length: int
    level: int
    stabilized: bool

    @property
    def partial(self) -> bool:
        return not self.stabilized

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w: object) -> bool:
        return w in self.words

    def __iter__(self):
        return iter(sorted(self.words))


@dataclass(frozen=True)
class BoundValue:
    bound: int
    regime: str
    level: int
    coarse: Optional[int] = None


@dataclass(frozen=True)
class ToeplitzReport:
    window: int
    periods: Tuple[Optional[int], ...]
    candidates: Tuple[int, ...]
    hole_densities: Tuple[Tuple[int, Fraction], ...]
    max_hole_density: Fraction
    flag: bool

    @property
    def unverified(self) -> Tuple[int, ...]:
        return tuple(p for p, q in enumerate(self.periods) if q is None)

    @property
    def strict(self) -> bool:
        """Every position in the window carries a verified period."""
        return self.window > 0 and all(q is not None for q in self.periods)


@dataclass(frozen=True)
class PrefixStability:
    """Outcome of the shared-prefix check; ``stable`` is None when it was not run."""

    left_proper: bool
    length: int = 0
    stable: Optional[bool] = None


@dataclass(frozen=True)
class BoshernitzanEstimate:
    alpha_estimate: Fraction
    measure_bound: int


def generate_word(
    ds: DirectiveSequence,
    level: int,
    letter: int,
    length: int,
    depth: Optional[int] = None,
    check_prefix: bool = True,
) -> Word:
    """Prefix of tau_[level, depth)(letter) of the given length.

    Only the letters needed for the prefix are expanded, one level at a time,
    using the image-length tables. When the levels above are left-proper the
    shared-prefix check runs as well and its outcome is logged.
    """
    depth = ds.depth if depth is None else depth
    if not 0 <= level < depth <= ds.depth:
        raise LanguageError(f"level {level} must lie below the depth {depth} (stored {ds.depth})")
    if not 1 <= letter <= ds.alphabet_size(depth):
        raise LanguageError(f"letter {letter} outside the level {depth} alphabet")
    total = ds.lengths(level, depth)[letter - 1]
    if total < length:
        raise LanguageError(
            f"tau_[{level},{depth})({letter}) has length {total} < {length}; more depth needed"
        )

    w = chr(letter)
    for j in range(depth - 1, level - 1, -1):
        lens = ds.lengths(level, j)
        runs = ds[j].runs()
        parts: List[str] = []
        covered = 0
        for c in w:
            for b, count in runs[ord(c) - 1]:
                step = lens[b - 1]
                if covered + count * step >= length:
                    take = -(-(length - covered) // step)
                    parts.append(chr(b) * take)
                    covered += take * step
                    break
                parts.append(chr(b) * count)
                covered += count * step
            if covered >= length:
                break
        w = "".join(parts)

    if check_prefix:
        stability = prefix_stability(ds, level, length, depth)
        if stability.stable is False:
            logger.warning(
                f"Prefixes of length {stability.length} at level {level} depend on the top letter "
                "although every level above is left-proper"
            )
    return w[:length]


def is_prefix_stable(ds: DirectiveSequence, level: int, length: int, depth: Optional[int] = None) -> bool:
    """Whether every letter at the top level yields the same prefix."""
    depth = ds.depth if depth is None else depth
    prefixes = {
        generate_word(ds, level, a, length, depth, check_prefix=False)
        for a in range(1, ds.alphabet_size(depth) + 1)
    }
    stable = len(prefixes) == 1
    logger.debug(f"Prefix stability at level {level}, length {length}: {stable}")
    return stable


def prefix_stability(ds: DirectiveSequence, level: int, length: int, depth: Optional[int] = None) -> PrefixStability:
    """Shared-prefix check, run only when tau_j is left-proper for level < j < depth, j >= 1.

    The images of tau_(depth-1) then start with one letter c, so prefixes no
    longer than <tau_[level, depth-1)> cannot depend on the top letter.
    """
    depth = ds.depth if depth is None else depth
    above = range(max(1, level + 1), depth)
    if not above or not all(ds[j].classify().left_proper for j in above):
        return PrefixStability(False)
    checked = min(length, ds.min_norm(level, depth - 1))
    return PrefixStability(True, checked, is_prefix_stable(ds, level, checked, depth))


def _window_starts(x: str, need: int, last: int) -> List[int]:
    """Start offsets <= last whose length-need windows can differ.

    A window inside a single run equals c^need, so only starts crossing a run
    boundary and the starts of long runs are kept.
    """
    if last < 0:
        return []
    if last < 2 * need:
        return list(range(last + 1))
    starts = set()
    for m in RUN_PATTERN.finditer(x, 0, last + need):
        r, e = m.start(), m.end()
        if e - r >= need and r <= last:
            starts.add(r)
        if r > 0:
            starts.update(range(max(0, r - need + 1), min(r, last + 1)))
    return sorted(starts)


def _slices(x: str, need: int, last: int) -> set:
    return {x[s : s + need] for s in _window_starts(x, need, last)}


class _WindowRecursion:
    """Length-n factors of tau_[j,k)(a) over all a, built from level j+1 downwards.

    For every (j, n) it keeps the set of length-n windows and, per top letter,
    the whole word tau_[j,k)(a) when shorter than n or else its last n-1
    letters. Each window at level j starts inside the first image of a level
    j+1 window or inside the image of a stored tail.
    """

    def __init__(self, ds: DirectiveSequence, k: int):
        self.ds = ds
        self.k = k
        self._memo: Dict[Tuple[int, int], Tuple[set, Tuple[Tuple[bool, str], ...]]] = {}

    def child_length(self, j: int, n: int) -> int:
        if n <= 1:
            return 1
        return (n - 2) // self.ds[j].norms()[0] + 2

    def level(self, j: int, n: int):
        key = (j, n)
        if key in self._memo:
            return self._memo[key]
        if j == self.k:
            letters = [chr(a) for a in range(1, self.ds.alphabet_size(j) + 1)]
            windows = set(letters) if n == 1 else set()
            ends = tuple((1 < n, c if 1 < n else "") for c in letters)
            self._memo[key] = (windows, ends)
            return self._memo[key]

        tau = self.ds[j]
        child_windows, child_ends = self.level(j + 1, self.child_length(j, n))
        windows = set()
        for u in child_windows:
            first = len(tau.image(ord(u[0])))
            parts, total = [], 0
            for c in u:
                image = tau.image(ord(c))
                parts.append(image)
                total += len(image)
                if total >= first - 1 + n:
                    break
            x = "".join(parts)
            windows |= _slices(x, n, min(first - 1, len(x) - n))
        ends = []
        for short, tail in child_ends:
            y = tau.apply(tail)
            windows |= _slices(y, n, len(y) - n)
            if short and len(y) < n:
                ends.append((True, y))
            else:
                ends.append((False, y[len(y) - (n - 1) :] if n > 1 else ""))
        self._memo[key] = (windows, tuple(ends))
        return self._memo[key]


def _check_primitive(ds: DirectiveSequence):
    if ds.primitive_window(0) is None:
        raise LanguageError("directive sequence is not primitive within the stored depth")


def factors(ds: DirectiveSequence, length: int, depth: Optional[int] = None) -> FactorSet:
    """Length-``length`` factors of the words tau_[0,k)(a), accumulated over k.

    Stops once two consecutive levels give the same set and <tau_[0,k)> is at
    least twice the length. Running out of depth gives a partial set.
    """
    if length < 1:
        raise LanguageError("factor length must be positive")
    depth = ds.depth if depth is None else depth
    if not 1 <= depth <= ds.depth:
        raise LanguageError(f"depth {depth} outside 1..{ds.depth}")
    _check_primitive(ds)

    accumulated: set = set()
    previous = None
    for k in range(1, depth + 1):
        windows, _ = _WindowRecursion(ds, k).level(0, length)
        accumulated |= windows
        grown = ds.min_norm(0, k) >= 2 * length
        logger.debug(f"Factors of length {length} at level {k}: {len(accumulated)} (grown={grown})")
        if previous is not None and accumulated == previous and grown:
            return FactorSet(frozenset(accumulated), length, k, True)
        previous = set(accumulated)
    logger.warning(f"Factor set of length {length} did not stabilize within depth {depth}")
    return FactorSet(frozenset(accumulated), length, depth, False)


def _common_prefix(a: str, b: str) -> int:
    low, high = 0, min(len(a), len(b))
    while low < high:
        mid = (low + high + 1) // 2
        if a[:mid] == b[:mid]:
            low = mid
        else:
            high = mid - 1
    return low


def complexity_profile(ds: DirectiveSequence, n_max: int, depth: Optional[int] = None) -> ComplexityProfile:
    """p(n) for n <= n_max from the length-n_max factors.

    Every shorter factor of a minimal language extends to the right, so p(n)
    is the number of distinct length-n prefixes of the length-n_max factors.
    """
    top = factors(ds, n_max, depth)
    ordered = sorted(top.words)
    below = [0] * (n_max + 2)
    for a, b in zip(ordered, ordered[1:]):
        below[_common_prefix(a, b) + 1] += 1
    values = []
    running = 0
    for n in range(1, n_max + 1):
        running += below[n]
        values.append(1 + running)
    return ComplexityProfile(tuple(values), top.level, top.stabilized, top.partial)


def locate_level(ds: DirectiveSequence, n: int) -> int:
    """i(n) with ||tau_[0,i)|| <= n < ||tau_[0,i+1)||."""
    if n < ds.norm(0, 1):
        raise LanguageError(f"n={n} is below ||tau_0||={ds.norm(0, 1)}")
    for i in range(1, ds.depth):
        if ds.norm(0, i) <= n < ds.norm(0, i + 1):
            return i
    raise LanguageError(f"depth {ds.depth} is too small to locate n={n}")


def complexity_bound(ds: DirectiveSequence, n: int) -> BoundValue:
    i = locate_level(ds, n)
    size = ds.alphabet_size
    if n < ds.min_norm(0, i + 1):
        bound = (size(i) + (size(i + 1) + 1) * ds[i].r_comp()) * n
        coarse = COARSE_REGIME_I * size(i + 2) ** 3 * n if i + 2 <= ds.depth else None
        return BoundValue(bound, "I", i, coarse)
    if i + 1 >= ds.depth:
        raise LanguageError(f"regime J at level {i} needs tau_{i + 1}; depth is {ds.depth}")
    bound = (
        size(i + 1)
        + size(i)
        + ds[i].r_comp()
        + (size(i + 2) + 1) * ds[i + 1].r_comp()
    ) * n
    coarse = COARSE_REGIME_J * size(i + 3) ** 3 * n if i + 3 <= ds.depth else None
    return BoundValue(bound, "J", i, coarse)


def toeplitz_check(
    w: Word, candidate_periods: Sequence[int], max_hole_density: Fraction = Fraction(1, 4)
) -> ToeplitzReport:
    """Periodic-skeleton evidence on a finite window.

    Candidates q with 2q <= len(w) are used. A residue class mod q is a hole
    when it is not constant over the window; every position reports the
    smallest candidate whose class through it is constant. The flag requires
    the hole density to fall strictly along the candidates (until it reaches
    zero) and to end at most ``max_hole_density``.
    """
    size = len(w)
    usable = tuple(q for q in sorted(set(candidate_periods)) if q >= 1 and 2 * q <= size)
    periods: List[Optional[int]] = [None] * size
    densities = []
    for q in usable:
        holes = 0
        for r in range(q):
            progression = w[r::q]
            if progression.count(progression[0]) == len(progression):
                for p in range(r, size, q):
                    if periods[p] is None:
                        periods[p] = q
            else:
                holes += 1
        densities.append((q, Fraction(holes, q)))

    flag = bool(densities)
    for (_, d1), (_, d2) in zip(densities, densities[1:]):
        if not (d2 < d1 or d1 == d2 == 0):
            flag = False
    if densities and densities[-1][1] > max_hole_density:
        flag = False
    logger.debug(f"Toeplitz check on {size} letters: densities {[str(d) for _, d in densities]}, flag={flag}")
    return ToeplitzReport(size, tuple(periods), usable, tuple(densities), Fraction(max_hole_density), flag)


def boshernitzan_bound(profile: ComplexityProfile) -> BoshernitzanEstimate:
    """Upper proxy for liminf p(n)/n from finite data and the ergodic-measure bound."""
    alpha = min(Fraction(p, n) for n, p in profile.items()) + Fraction(1, profile.n_max)
    return BoshernitzanEstimate(alpha, max(alpha.numerator // alpha.denominator, 1))
