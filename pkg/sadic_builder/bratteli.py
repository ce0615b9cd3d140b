"""Bratteli diagrams: storage, telescoping, level splitting and adapted sequences."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Tuple

from .errors import DiagramError, DimensionError
from .exact_linear import (
    AnyMatrix,
    ExactMatrix,
    RationalMatrix,
    invert_rational,
    mat_mul,
    ones_column,
)

if TYPE_CHECKING:
    from .morphisms import Morphism

logger = logging.getLogger("sadic-builder")


@dataclass(frozen=True)
class BratteliDiagram:
    """Finite truncation of a Bratteli diagram.

    ``incidences[i]`` is the |V_{i+1}| x |V_i| matrix A_i. ``repeat`` holds
    matrices appended cyclically after the stored ones when deeper levels are
    requested. ``order[i]`` is the morphism V_{i+1} -> V_i listing, for every
    vertex, the sources of its incoming edges in order.
    """

    level_sizes: Tuple[int, ...]
    incidences: Tuple[ExactMatrix, ...]
    order: Optional[Tuple["Morphism", ...]] = None
    repeat: Tuple[ExactMatrix, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "level_sizes", tuple(int(s) for s in self.level_sizes))
        object.__setattr__(self, "incidences", tuple(self.incidences))
        object.__setattr__(self, "repeat", tuple(self.repeat))
        if self.order is not None:
            object.__setattr__(self, "order", tuple(self.order))
        self._validate()

    def _validate(self):
        sizes = self.level_sizes
        if not sizes or sizes[0] != 1:
            raise DiagramError("level 0 must contain exactly one vertex (the root)")
        if len(sizes) != len(self.incidences) + 1:
            raise DiagramError(
                f"{len(sizes)} level sizes do not match {len(self.incidences)} incidence matrices"
            )
        for i, a in enumerate(self.incidences):
            _check_incidence(a, sizes[i + 1], sizes[i], i)
        if self.repeat:
            size = sizes[-1]
            for k, a in enumerate(self.repeat):
                if a.cols != size:
                    raise DiagramError(f"repeat matrix {k} has {a.cols} columns, expected {size}")
                _check_incidence(a, a.rows, a.cols, len(self.incidences) + k)
                size = a.rows
            if self.repeat[0].cols != size:
                raise DiagramError("repeat cycle does not close: last matrix rows differ from first columns")
        if self.order is not None:
            if len(self.order) != len(self.incidences):
                raise DiagramError("order must provide one morphism per stored level")
            for i, tau in enumerate(self.order):
                if tau.incidence().transpose() != self.incidences[i]:
                    raise DiagramError(f"order at level {i} does not match incidence matrix A_{i}")

    @property
    def depth(self) -> int:
        return len(self.incidences)

    @property
    def is_ordered(self) -> bool:
        return self.order is not None

    def incidence(self, i: int) -> ExactMatrix:
        """A_i, taken from the repeat cycle past the stored prefix."""
        if i < 0:
            raise DiagramError(f"level {i} out of range")
        if i < self.depth:
            return self.incidences[i]
        if not self.repeat:
            raise DiagramError(f"level {i} beyond stored depth {self.depth} and no repeat rule")
        return self.repeat[(i - self.depth) % len(self.repeat)]

    def level_size(self, i: int) -> int:
        if i == 0:
            return 1
        return self.incidence(i - 1).rows

    def expand(self, depth: int) -> "BratteliDiagram":
        """Concrete diagram with ``depth`` incidence matrices (order dropped)."""
        matrices = [self.incidence(i) for i in range(depth)]
        sizes = [1] + [a.rows for a in matrices]
        return BratteliDiagram(tuple(sizes), tuple(matrices))

    def with_order(self, order: Sequence["Morphism"]) -> "BratteliDiagram":
        return BratteliDiagram(self.level_sizes, self.incidences, tuple(order), self.repeat)


def _check_incidence(a: ExactMatrix, rows: int, cols: int, level: int):
    if a.shape != (rows, cols):
        raise DiagramError(f"A_{level} has shape {a.shape}, expected ({rows}, {cols})")
    if not a.is_nonnegative():
        raise DiagramError(f"A_{level} has a negative entry")
    table = a.tolist()
    if any(not any(row) for row in table):
        raise DiagramError(f"A_{level} has a vertex without incoming edges (zero row)")
    if any(not any(table[r][c] for r in range(rows)) for c in range(cols)):
        raise DiagramError(f"A_{level} has a vertex without outgoing edges (zero column)")


def diagram_from_matrices(matrices: Sequence[AnyMatrix], repeat: Sequence[AnyMatrix] = ()) -> BratteliDiagram:
    exact = [m if isinstance(m, ExactMatrix) else ExactMatrix(m) for m in matrices]
    cycle = [m if isinstance(m, ExactMatrix) else ExactMatrix(m) for m in repeat]
    sizes = [1] + [a.rows for a in exact]
    return BratteliDiagram(tuple(sizes), tuple(exact), None, tuple(cycle))


def window_product(diagram: BratteliDiagram, start: int, end: int) -> ExactMatrix:
    """A_{end-1} ... A_start."""
    if end <= start:
        raise DiagramError(f"empty window [{start}, {end})")
    product = diagram.incidence(start)
    for i in range(start + 1, end):
        product = mat_mul(diagram.incidence(i), product)
    return product


def telescope(diagram: BratteliDiagram, cuts: Sequence[int]) -> BratteliDiagram:
    """Replace runs between consecutive cuts by their products.

    Cuts past the stored depth are allowed only when the diagram repeats.
    Order data is dropped.
    """
    cuts = list(cuts)
    if len(cuts) < 2 or cuts[0] != 0:
        raise DiagramError("cuts must start at level 0 and contain at least two levels")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise DiagramError(f"cuts must be strictly increasing: {cuts}")
    if not diagram.repeat and cuts[-1] > diagram.depth:
        raise DiagramError(f"cut {cuts[-1]} beyond stored depth {diagram.depth}")
    matrices = [window_product(diagram, a, b) for a, b in zip(cuts, cuts[1:])]
    logger.debug(f"Telescoped levels {cuts} into {len(matrices)} matrices")
    return diagram_from_matrices(matrices)


def grow_window(
    diagram: BratteliDiagram,
    start: int,
    accept: Callable[[ExactMatrix], bool],
    horizon: int,
) -> Tuple[int, ExactMatrix]:
    """Extend [start, end) until ``accept`` holds for the window product.

    Returns the exclusive end and the product. Raises DiagramError once the
    window would pass ``horizon`` levels (or the stored depth when the
    diagram does not repeat).
    """
    limit = horizon if diagram.repeat else min(horizon, diagram.depth)
    product = None
    for end in range(start + 1, limit + 1):
        a = diagram.incidence(end - 1)
        product = a if product is None else mat_mul(a, product)
        if accept(product):
            return end, product
    raise DiagramError(f"no acceptable telescoping window starting at level {start} within {limit} levels")


def telescope_to_positive(diagram: BratteliDiagram, depth: int, horizon: int) -> Tuple[BratteliDiagram, List[int]]:
    """Greedy telescoping into ``depth`` positive matrices."""
    cuts = [0]
    matrices = []
    for _ in range(depth):
        end, product = grow_window(diagram, cuts[-1], lambda m: m.is_positive(), horizon)
        cuts.append(end)
        matrices.append(product)
    return diagram_from_matrices(matrices), cuts


@dataclass(frozen=True)
class SplitResult:
    b: ExactMatrix
    c: ExactMatrix
    d: int
    q: ExactMatrix
    r: ExactMatrix


def split_level(a: ExactMatrix, d: int) -> SplitResult:
    """Write A = dQ + R and factor A = B C with the columns of dQ and R interleaved."""
    if d < 1:
        raise DiagramError(f"splitting modulus must be positive, got {d}")
    if not a.is_positive():
        raise DiagramError("splitting needs a matrix with positive entries")
    n, m = a.shape
    table = a.tolist()
    q = [[x // d for x in row] for row in table]
    r = [[x % d for x in row] for row in table]
    b = [[0] * (2 * m) for _ in range(n)]
    for k in range(n):
        for i in range(m):
            b[k][2 * i] = d * q[k][i]
            b[k][2 * i + 1] = r[k][i]
    c = [[1 if row // 2 == col else 0 for col in range(m)] for row in range(2 * m)]
    result = SplitResult(ExactMatrix(b), ExactMatrix(c), d, ExactMatrix(q), ExactMatrix(r))
    if mat_mul(result.b, result.c) != a:
        raise DimensionError("split does not reproduce the input matrix")
    return result


def path_counts(diagram: BratteliDiagram, level: int) -> Tuple[int, ...]:
    """Number of root paths to every vertex of ``level``."""
    if level < 0 or (level > diagram.depth and not diagram.repeat):
        raise DiagramError(f"level {level} out of range 0..{diagram.depth}")
    if level == 0:
        return (1,)
    return window_product(diagram, 0, level).column(0)


@dataclass(frozen=True)
class SimplicityReport:
    flag: bool
    window: Optional[Tuple[int, int]] = None

    @property
    def window_length(self) -> Optional[int]:
        return None if self.window is None else self.window[1] - self.window[0]


def check_simple(diagram: BratteliDiagram, depth: Optional[int] = None) -> SimplicityReport:
    """Shortest contiguous window with an entrywise positive product.

    The root column A_0 is positive in every diagram and witnesses nothing,
    so windows start at level 1 at every depth. A one-level diagram is never
    reported simple.
    """
    depth = diagram.depth if depth is None else depth
    if depth > diagram.depth and not diagram.repeat:
        raise DiagramError(f"depth {depth} beyond stored depth {diagram.depth}")
    for length in range(1, depth):
        for start in range(1, depth - length + 1):
            if window_product(diagram, start, start + length).is_positive():
                return SimplicityReport(True, (start, start + length))
    return SimplicityReport(False, None)


@dataclass(frozen=True)
class AdaptedLevel:
    level: int
    j_positive: bool
    j_inverse_positive: bool
    smallest_m: Optional[int]
    smallest_m_integral: Optional[int]
    b: RationalMatrix
    b_integral: bool
    b_positive: bool

    @property
    def adapted(self) -> bool:
        return self.smallest_m is not None and self.b_integral and self.b_positive


@dataclass(frozen=True)
class AdaptedReport:
    levels: Tuple[AdaptedLevel, ...] = field(default_factory=tuple)

    @property
    def adapted(self) -> bool:
        return all(level.adapted for level in self.levels)

    @property
    def integral(self) -> bool:
        return all(level.b_integral and level.smallest_m_integral is not None for level in self.levels)

    def first_failure(self) -> Optional[str]:
        for level in self.levels:
            if level.smallest_m is None:
                return f"level {level.level}: condition (1) no M with A_M...A_i J_i^-1 positive integer"
            if not level.b_integral:
                return f"level {level.level}: condition (2) J_(i+1) A_i J_i^-1 not integral"
            if not level.b_positive:
                return f"level {level.level}: condition (2) J_(i+1) A_i J_i^-1 not positive"
        return None


def verify_adapted(
    a_seq: Sequence[AnyMatrix],
    j_seq: Sequence[AnyMatrix],
    horizon: Optional[int] = None,
) -> AdaptedReport:
    """Check the two adapted-sequence conditions level by level."""
    horizon = len(a_seq) if horizon is None else horizon
    if horizon > len(a_seq) or horizon > len(j_seq) - 1:
        raise DimensionError(
            f"horizon {horizon} needs {horizon} matrices A_i and {horizon + 1} matrices J_i"
        )
    levels = []
    for i in range(horizon):
        a = a_seq[i]
        j, j_next = j_seq[i], j_seq[i + 1]
        if j.shape != (a.cols, a.cols) or j_next.shape != (a.rows, a.rows):
            raise DimensionError(f"J_{i} / J_{i + 1} do not conform with A_{i} of shape {a.shape}")
        j_inv = invert_rational(j)
        b = mat_mul(mat_mul(j_next, a), j_inv).to_rational()

        smallest_m = None
        smallest_m_integral = None
        running = mat_mul(a, j_inv)
        for m in range(i, len(a_seq)):
            if m > i:
                running = mat_mul(a_seq[m], running)
            integral = running.to_rational().is_integral()
            if integral and smallest_m_integral is None:
                smallest_m_integral = m
            if integral and running.is_positive():
                smallest_m = m
                break

        levels.append(
            AdaptedLevel(
                level=i,
                j_positive=j.is_positive(),
                j_inverse_positive=j_inv.is_positive(),
                smallest_m=smallest_m,
                smallest_m_integral=smallest_m_integral,
                b=b,
                b_integral=b.is_integral(),
                b_positive=b.is_positive(),
            )
        )
        logger.debug(f"Adapted check level {i}: M={smallest_m}, B integral={b.is_integral()}")
    return AdaptedReport(tuple(levels))


def order_unit(
    a_seq: Sequence[AnyMatrix], j_seq: Sequence[AnyMatrix], m0: int
) -> Tuple[int, Tuple[int, ...]]:
    """Unit [A_{M0} ... A_0 J_0^{-1} 1, M0 + 1] of the original inductive limit."""
    if m0 < 0 or m0 >= len(a_seq):
        raise DimensionError(f"M0={m0} outside stored levels")
    vector = mat_mul(invert_rational(j_seq[0]), ones_column(j_seq[0].rows))
    for i in range(m0 + 1):
        vector = mat_mul(a_seq[i], vector)
    vector = vector.to_rational()
    if not vector.is_integral():
        raise DimensionError(f"A_{m0}...A_0 J_0^-1 1 is not integral")
    return m0 + 1, tuple(int(x) for x in vector.column(0))


def divisibility_witness(
    a_seq: Sequence[ExactMatrix], x: Sequence[int], level: int, k: int
) -> Tuple[int, Tuple[int, ...]]:
    """Explicit h = [y, j] with k*h = [x, level] when A_i is divisible by i+1.

    j = k*level (or k when level = 0) and y = A_{j-1} ... A_level x / k.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return level, tuple(int(v) for v in x)
    target = k if level == 0 else k * level
    if target > len(a_seq):
        raise DiagramError(f"division by {k} needs level {target}, only {len(a_seq)} matrices stored")
    last = a_seq[target - 1]
    if any(entry % target for entry in last.entries()):
        raise DiagramError(f"A_{target - 1} is not divisible by {target}")
    vector = ExactMatrix.column_vector(list(x))
    for i in range(level, target):
        vector = mat_mul(a_seq[i], vector)
    values = vector.column(0)
    return target, tuple(v // k for v in values)


def default_order_images(a: ExactMatrix) -> List[List[int]]:
    """Left/right order: sources listed in increasing vertex order."""
    images = []
    for row in a.tolist():
        image = []
        for source, count in enumerate(row, start=1):
            image.extend([source] * count)
        images.append(image)
    return images


def is_left_right_ordered(images: Sequence[Sequence[int]]) -> bool:
    return all(all(x <= y for x, y in zip(image, image[1:])) for image in images)
