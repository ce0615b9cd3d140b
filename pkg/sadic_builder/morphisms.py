"""Free-monoid morphisms, directive sequences and recognizability checks.

Words are Python strings whose code points are the (1-based) letter indices,
so ``chr(1)`` is the first letter of an alphabet. Images of deep compositions
get long; keeping them as ``str`` lets slicing, ``str.translate`` and the
``re`` run scanner do the heavy lifting.
"""
import heapq
import itertools
import logging
import random
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import MorphismError
from .exact_linear import ExactMatrix, mat_mul

logger = logging.getLogger("sadic-builder")

Word = str
Run = Tuple[int, int]

RUN_PATTERN = re.compile(r"(.)\1*", re.DOTALL)


def word(letters: Iterable[int]) -> Word:
    return "".join(chr(int(a)) for a in letters)


def letters(w: Word) -> List[int]:
    return [ord(c) for c in w]


def runs_of(w: Word) -> List[Run]:
    """Maximal constant blocks of ``w`` as (letter, length) pairs."""
    return [(ord(m.group(1)), m.end() - m.start()) for m in RUN_PATTERN.finditer(w)]


def word_from_runs(runs: Iterable[Run]) -> Word:
    return "".join(chr(int(a)) * int(count) for a, count in runs)


@dataclass(frozen=True)
class MorphismFlags:
    positive: bool
    left_proper: bool
    right_proper: bool
    proper: bool
    hat: bool
    letter_injective: bool


class Morphism:
    """Non-erasing morphism from an m-letter alphabet to an n-letter alphabet."""

    __slots__ = ("domain", "codomain", "_images", "_table", "_incidence", "_runs")

    def __init__(
        self,
        images: Sequence[Union[Word, Sequence[int]]],
        codomain: Optional[int] = None,
    ):
        if not images:
            raise MorphismError("a morphism needs at least one letter in its domain")
        converted = tuple(image if isinstance(image, str) else word(image) for image in images)
        for a, image in enumerate(converted, start=1):
            if not image:
                raise MorphismError(f"image of letter {a} is empty (erasing morphisms are not supported)")
        top = max(max(map(ord, image)) for image in converted)
        low = min(min(map(ord, image)) for image in converted)
        if low < 1:
            raise MorphismError("letters are indexed from 1")
        if codomain is None:
            codomain = top
        elif top > codomain:
            raise MorphismError(f"letter {top} outside codomain alphabet of size {codomain}")
        self.domain = len(converted)
        self.codomain = int(codomain)
        self._images = converted
        self._table = {a: image for a, image in enumerate(converted, start=1)}
        self._incidence = None
        self._runs = None

    @classmethod
    def from_runs(cls, runs: Sequence[Sequence[Run]], codomain: Optional[int] = None) -> "Morphism":
        return cls([word_from_runs(r) for r in runs], codomain)

    @classmethod
    def identity(cls, n: int) -> "Morphism":
        return cls([chr(a) for a in range(1, n + 1)], n)

    @property
    def images(self) -> Tuple[Word, ...]:
        return self._images

    def image(self, a: int) -> Word:
        if not 1 <= a <= self.domain:
            raise MorphismError(f"letter {a} outside domain alphabet of size {self.domain}")
        return self._images[a - 1]

    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(image) for image in self._images)

    def runs(self) -> Tuple[Tuple[Run, ...], ...]:
        if self._runs is None:
            self._runs = tuple(tuple(runs_of(image)) for image in self._images)
        return self._runs

    def apply(self, w: Word) -> Word:
        """Image of a domain word, letter by letter."""
        if w and (min(map(ord, w)) < 1 or max(map(ord, w)) > self.domain):
            raise MorphismError(f"word has letters outside the domain alphabet of size {self.domain}")
        return w.translate(self._table)

    def incidence(self) -> ExactMatrix:
        if self._incidence is None:
            counts = [[0] * self.domain for _ in range(self.codomain)]
            for a, block in enumerate(self.runs()):
                for b, count in block:
                    counts[b - 1][a] += count
            self._incidence = ExactMatrix(counts)
        return self._incidence

    def norms(self) -> Tuple[int, int]:
        lengths = self.lengths()
        return min(lengths), max(lengths)

    def r_comp(self) -> int:
        return sum(len(block) for block in self.runs())

    def classify(self) -> MorphismFlags:
        images = self._images
        left = len({image[0] for image in images}) == 1
        right = len({image[-1] for image in images}) == 1
        seen = "".join(images)
        return MorphismFlags(
            positive=self.incidence().is_positive(),
            left_proper=left,
            right_proper=right,
            proper=left and right,
            hat=len(set(seen)) == len(seen),
            letter_injective=len(set(images)) == len(images),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.codomain == other.codomain and self._images == other._images

    def __hash__(self) -> int:
        return hash((self.codomain, self._images))

    def __repr__(self) -> str:
        shown = []
        for block in self.runs():
            shown.append(" ".join(f"{a}^{n}" if n > 1 else str(a) for a, n in block[:6]) + (" ..." if len(block) > 6 else ""))
        return f"Morphism({self.domain}->{self.codomain}: " + "; ".join(shown) + ")"


def compose(sigma: Morphism, tau: Morphism) -> Morphism:
    """sigma o tau: apply tau, then sigma letter by letter."""
    if sigma.domain != tau.codomain:
        raise MorphismError(
            f"cannot compose: sigma reads {sigma.domain} letters, tau writes {tau.codomain}"
        )
    return Morphism([sigma.apply(image) for image in tau.images], sigma.codomain)


def incidence(tau: Morphism) -> ExactMatrix:
    return tau.incidence()


def norms(tau: Morphism) -> Tuple[int, int]:
    return tau.norms()


def r_comp(tau: Morphism) -> int:
    return tau.r_comp()


def classify(tau: Morphism) -> MorphismFlags:
    return tau.classify()


def level_matrix(tau: Morphism) -> ExactMatrix:
    """Diagram orientation of the incidence: rows index the domain letters."""
    return tau.incidence().transpose()


def order_lemma_injective(a: ExactMatrix) -> Morphism:
    """Order every r^{-1}(v_j) so that the first j edges come from u_1.

    tau(v_j) = u_1^j u_2^{A(j,2)} u_1^{A(j,1)-j} u_3^{A(j,3)} ... u_m^{A(j,m)}.
    The length of the leading u_1 block tells the images apart.
    """
    rows, cols = a.shape
    if cols < 2:
        raise MorphismError(f"the source level needs at least 2 vertices, got {cols}")
    if not a.is_positive():
        raise MorphismError("order_lemma_injective needs a positive matrix")
    images = []
    for j in range(1, rows + 1):
        row = a.row(j - 1)
        if row[0] <= rows:
            raise MorphismError(
                f"A({j},1)={row[0]} must exceed the number of target vertices {rows}"
            )
        blocks = [(1, j), (2, row[1]), (1, row[0] - j)]
        blocks.extend((k, row[k - 1]) for k in range(3, cols + 1))
        images.append(word_from_runs(blocks))
    tau = Morphism(images, cols)
    if level_matrix(tau) != a:
        raise MorphismError("constructed order does not reproduce the incidence matrix")
    return tau


class DirectiveSequence:
    """tau_0, tau_1, ... with tau_i mapping the level i+1 alphabet into the level i alphabet."""

    def __init__(self, morphisms: Sequence[Morphism]):
        if not morphisms:
            raise MorphismError("a directive sequence needs at least one morphism")
        for i in range(len(morphisms) - 1):
            if morphisms[i].domain != morphisms[i + 1].codomain:
                raise MorphismError(
                    f"tau_{i} reads {morphisms[i].domain} letters but tau_{i + 1} writes {morphisms[i + 1].codomain}"
                )
        self.morphisms: Tuple[Morphism, ...] = tuple(morphisms)
        self._lengths: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        self._incidences: Dict[Tuple[int, int], ExactMatrix] = {}

    def __len__(self) -> int:
        return len(self.morphisms)

    def __getitem__(self, i: int) -> Morphism:
        return self.morphisms[i]

    def __iter__(self):
        return iter(self.morphisms)

    @property
    def depth(self) -> int:
        return len(self.morphisms)

    def alphabet_size(self, i: int) -> int:
        """|A_i|: codomain of tau_i, or domain of tau_{i-1} at the deepest level."""
        if i < len(self.morphisms):
            return self.morphisms[i].codomain
        if i == len(self.morphisms):
            return self.morphisms[-1].domain
        raise MorphismError(f"level {i} beyond depth {self.depth}")

    def alphabet_sizes(self) -> Tuple[int, ...]:
        return tuple(self.alphabet_size(i) for i in range(self.depth + 1))

    def flags(self) -> Tuple[MorphismFlags, ...]:
        return tuple(tau.classify() for tau in self.morphisms)

    def _check_window(self, i: int, k: int):
        if not 0 <= i <= k <= self.depth:
            raise MorphismError(f"window [{i}, {k}) outside 0..{self.depth}")

    def lengths(self, i: int, k: int) -> Tuple[int, ...]:
        """|tau_[i,k)(a)| for every letter a of level k, from incidence data only."""
        self._check_window(i, k)
        key = (i, k)
        if key not in self._lengths:
            if i == k:
                self._lengths[key] = (1,) * self.alphabet_size(k)
            else:
                inner = self.lengths(i, k - 1)
                tau = self.morphisms[k - 1]
                self._lengths[key] = tuple(
                    sum(inner[b - 1] * count for b, count in block) for block in tau.runs()
                )
        return self._lengths[key]

    def norm(self, i: int, k: int) -> int:
        return max(self.lengths(i, k))

    def min_norm(self, i: int, k: int) -> int:
        return min(self.lengths(i, k))

    def incidence(self, i: int, k: int) -> ExactMatrix:
        """Incidence of tau_[i,k) = M(tau_i) ... M(tau_{k-1})."""
        self._check_window(i, k)
        if i == k:
            return ExactMatrix.identity(self.alphabet_size(i))
        key = (i, k)
        if key not in self._incidences:
            self._incidences[key] = mat_mul(self.incidence(i, k - 1), self.morphisms[k - 1].incidence())
        return self._incidences[key]

    def compose(self, i: int, k: int) -> Morphism:
        """Explicit tau_[i,k); image lengths are the products of the incidences."""
        self._check_window(i, k)
        if i == k:
            return Morphism.identity(self.alphabet_size(i))
        result = self.morphisms[k - 1]
        for j in range(k - 2, i - 1, -1):
            result = compose(self.morphisms[j], result)
        return result

    def primitive_window(self, i: int = 0) -> Optional[int]:
        """Smallest k with tau_[i,k) positive, or None within the stored depth."""
        for k in range(i + 1, self.depth + 1):
            if self.incidence(i, k).is_positive():
                return k
        return None

    def is_primitive_within(self) -> bool:
        return self.primitive_window(0) is not None

    def is_everywhere_growing_within(self, bound: int) -> bool:
        """<tau_[0,L)> >= bound at the stored depth L."""
        return self.min_norm(0, self.depth) >= bound

    def truncate(self, depth: int) -> "DirectiveSequence":
        if not 1 <= depth <= self.depth:
            raise MorphismError(f"cannot truncate depth {self.depth} to {depth}")
        return DirectiveSequence(self.morphisms[:depth])


def read_morphisms(diagram) -> DirectiveSequence:
    """Directive sequence read on an ordered diagram.

    Level 0 gives the hat morphism onto the E_1 edge alphabet; deeper levels
    are the stored orders themselves.
    """
    if diagram.order is None:
        raise MorphismError("diagram carries no order; cannot read morphisms")
    first = diagram.incidences[0]
    images = []
    next_edge = 1
    for count in first.column(0):
        images.append(word(range(next_edge, next_edge + count)))
        next_edge += count
    tau0 = Morphism(images, next_edge - 1)
    return DirectiveSequence([tau0, *diagram.order[1:]])


def cutting_points(tau: Morphism, w: Union[Word, Sequence[int]]) -> Tuple[int, ...]:
    if not isinstance(w, str):
        w = word(w)
    points = [0]
    for c in w:
        points.append(points[-1] + len(tau.image(ord(c))))
    return tuple(points)


@dataclass(frozen=True)
class RecognizabilityReport:
    letter_injective: bool
    marker_holds: bool
    marker_violations: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)
    words_checked: int = 0
    ambiguous: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)

    @property
    def decoding_unique(self) -> bool:
        return not self.ambiguous

    @property
    def passed(self) -> bool:
        return self.decoding_unique


def marker_violations(tau: Morphism) -> List[Tuple[int, int]]:
    """Places where u_n u_1 does not mark exactly the cutting points.

    Each entry is (domain letter, offset); offset -1 flags an image that does
    not start with u_1 or end with u_n.
    """
    first, last = chr(1), chr(tau.codomain)
    violations = []
    marker = last + first
    for a, image in enumerate(tau.images, start=1):
        if image[0] != first or image[-1] != last:
            violations.append((a, -1))
        start = image.find(marker)
        while start != -1:
            violations.append((a, start + 1))
            start = image.find(marker, start + 1)
    return violations


def count_parses(tau: Morphism, target: Word, cap: int = 2) -> int:
    """Number of domain words w with tau(w) == target, stopping at ``cap``.

    Only positions reachable as partial parses are visited, in increasing order.
    """
    end = len(target)
    counts = {0: 1}
    pending = [0]
    while pending:
        pos = heapq.heappop(pending)
        total = counts.pop(pos)
        if pos == end:
            return total
        for image in tau.images:
            if target.startswith(image, pos):
                nxt = pos + len(image)
                if nxt not in counts:
                    counts[nxt] = 0
                    heapq.heappush(pending, nxt)
                counts[nxt] = min(cap, counts[nxt] + total)
    return 0


def sample_words(domain: int, window: int, samples: int, length: int, seed: int) -> List[Word]:
    """All words of length <= window plus seeded random longer ones."""
    words = []
    for n in range(1, window + 1):
        words.extend(word(p) for p in itertools.product(range(1, domain + 1), repeat=n))
    rng = random.Random(seed)
    for _ in range(samples):
        words.append(word(rng.randint(1, domain) for _ in range(length)))
    return words


def verify_recognizability(
    tau: Morphism,
    words: Optional[Sequence[Union[Word, Sequence[int]]]] = None,
    window: int = 4,
    random_samples: int = 8,
    random_length: int = 8,
    seed: int = 0,
) -> RecognizabilityReport:
    flags = tau.classify()
    if not flags.letter_injective:
        logger.warning("Recognizability check on a morphism that is not letter-injective")
    violations = marker_violations(tau)
    if words is None:
        words = sample_words(tau.domain, window, random_samples, random_length, seed)
    ambiguous = []
    for w in words:
        w = w if isinstance(w, str) else word(w)
        if count_parses(tau, tau.apply(w)) > 1:
            ambiguous.append(tuple(letters(w)))
    logger.debug(
        f"Recognizability: {len(words)} words, {len(ambiguous)} ambiguous, {len(violations)} marker violations"
    )
    return RecognizabilityReport(
        letter_injective=flags.letter_injective,
        marker_holds=not violations,
        marker_violations=tuple(violations),
        words_checked=len(words),
        ambiguous=tuple(ambiguous),
    )
