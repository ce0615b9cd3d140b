"""Pipelines turning a simple Bratteli diagram and a target p_n into a low-complexity subshift.

``build_main1`` splits telescoped levels and conjugates by adapted matrices
J_i; ``build_toeplitz`` normalizes row sums for divisible groups so that every
level has equal row sums. Both end with the lemma-injective order and the
directive sequence read on the ordered diagram.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .bratteli import (
    AdaptedReport,
    BratteliDiagram,
    SplitResult,
    default_order_images,
    grow_window,
    split_level,
    verify_adapted,
)
from .errors import (
    ConstructionError,
    DiagramError,
    DimensionError,
    LanguageError,
    MorphismError,
    SadicError,
    ThresholdError,
)
from .exact_linear import (
    AnyMatrix,
    ExactMatrix,
    RationalMatrix,
    invert_rational,
    is_divisible,
    is_ers,
    lcm_denominators,
    mat_mul,
)
from .language import (
    COARSE_REGIME_I,
    COARSE_REGIME_J,
    BoshernitzanEstimate,
    ComplexityProfile,
    PrefixStability,
    ToeplitzReport,
    boshernitzan_bound,
    complexity_bound,
    complexity_profile,
    generate_word,
    prefix_stability,
    toeplitz_check,
)
from .morphisms import (
    DirectiveSequence,
    Morphism,
    RecognizabilityReport,
    marker_violations,
    order_lemma_injective,
    read_morphisms,
    verify_recognizability,
)
from .targets import ComplexityTarget

logger = logging.getLogger("sadic-builder")

# Constants absorbing |V''_{i+2}|^3 = 8 m_{i+1}^3 in the final bounds of the splitting pipeline.
MAIN1_REGIME_I_CONSTANT = 24
MAIN1_REGIME_J_CONSTANT = 40
# Constant in p_Y(n) <= 3 m_{i+2}^3 n for the Toeplitz pipeline.
TOEPLITZ_CONSTANT = 3

MAIN1 = "main1"
TOEPLITZ = "toeplitz"


@dataclass(frozen=True)
class Diagnostic:
    """One checked condition. ``level`` is the construction level i used in the
    condition names; ``index`` is the position of the matrix it concerns in the
    stored arrays when the two differ."""

    level: int
    condition: str
    value: str
    passed: bool
    required: bool = True
    index: Optional[int] = None

    @property
    def array_index(self) -> int:
        return self.level if self.index is None else self.index

    def where(self) -> str:
        return f"level {self.level} (array index {self.array_index})"


@dataclass(frozen=True)
class LevelRecord:
    """Per-level parameters; h for the splitting pipeline, k/s/l for the Toeplitz one."""

    level: int
    t: int
    h: Optional[int] = None
    k: Optional[int] = None
    s: Optional[int] = None
    l: Optional[int] = None
    window: Optional[Tuple[int, int]] = None


@dataclass
class ConstructionResult:
    mode: str
    target: str
    depth: int
    diagram: Optional[BratteliDiagram] = None
    directive: Optional[DirectiveSequence] = None
    a_seq: Tuple[AnyMatrix, ...] = ()
    j_seq: Tuple[RationalMatrix, ...] = ()
    levels: Tuple[LevelRecord, ...] = ()
    cuts: Tuple[int, ...] = ()
    telescoped: Tuple[ExactMatrix, ...] = ()
    splits: Tuple[SplitResult, ...] = ()
    periods: Tuple[int, ...] = ()
    diagnostics: List[Diagnostic] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None or self.first_failure() is not None

    def first_failure(self) -> Optional[Diagnostic]:
        for diagnostic in self.diagnostics:
            if diagnostic.required and not diagnostic.passed:
                return diagnostic
        return None

    def advisories(self) -> List[Diagnostic]:
        return [d for d in self.diagnostics if not d.required and not d.passed]

    def record(
        self, level: int, condition: str, value, passed: bool, required: bool = True, index: Optional[int] = None
    ) -> bool:
        diagnostic = Diagnostic(level, condition, str(value), bool(passed), required, index)
        self.diagnostics.append(diagnostic)
        if passed:
            logger.debug(f"At {diagnostic.where()}: {condition} holds ({value})")
        elif required:
            if sum(1 for d in self.diagnostics if d.required and not d.passed) == 1:
                logger.error(f"At {diagnostic.where()}: {condition} violated ({value})")
        else:
            logger.warning(f"At {diagnostic.where()}: advisory condition {condition} does not hold ({value})")
        return bool(passed)

    def fail(self, level: Optional[int], condition: str, message: str):
        self.record(-1 if level is None else level, condition, message, False)
        self.error = message

    def status(self) -> str:
        return "FAILED" if self.failed else "OK"


def threshold(target: ComplexityTarget, m: int, level: int, scan_limit: int) -> int:
    """Smallest t with level * m^3 * t < p_t from t on, up to scan_limit.

    Past the target's monotonicity point the condition is monotone, so a
    binary search finds the crossing; below it (and for tables) the scan
    walks down one step at a time.
    """
    if scan_limit < 1:
        raise ValueError("scan_limit must be at least 1")
    if level < 1:
        raise ValueError("threshold levels start at 1")
    factor = level * m ** 3

    def holds(t: int) -> bool:
        return target.greater_than(t, factor * t)

    limit = scan_limit if target.horizon is None else min(scan_limit, target.horizon)
    if not holds(limit):
        raise ThresholdError(level, m, scan_limit)

    n0 = target.monotone_from
    if n0 is None:
        t = limit
    else:
        low = max(1, min(n0, limit))
        if holds(low):
            t = low
        else:
            high = limit
            while high - low > 1:
                mid = (low + high) // 2
                if holds(mid):
                    high = mid
                else:
                    low = mid
            t = high
    while t > 1 and holds(t - 1):
        t -= 1
    logger.debug(f"Threshold at level {level} with m={m}: t={t}")
    return t


def _level_size(telescoped: Sequence[ExactMatrix], j: int) -> int:
    """|V_j| of the telescoped diagram (|V_{-1}| taken as 1)."""
    if j <= 0:
        return 1
    return telescoped[j - 1].rows


def _adapted_j(h: int, size: int) -> ExactMatrix:
    """J = S D: D has h on odd and 1 on even positions, S adds row 2j-1 into row 2j."""
    rows = [[0] * size for _ in range(size)]
    for j in range(0, size, 2):
        rows[j][j] = h
        rows[j + 1][j] = h
        rows[j + 1][j + 1] = 1
    return ExactMatrix(rows)


def _ordered_diagram(incidences: Sequence[ExactMatrix]) -> Tuple[BratteliDiagram, DirectiveSequence]:
    order = [Morphism(default_order_images(incidences[0]), 1)]
    order.extend(order_lemma_injective(a) for a in incidences[1:])
    sizes = [1] + [a.rows for a in incidences]
    diagram = BratteliDiagram(tuple(sizes), tuple(incidences), tuple(order))
    return diagram, read_morphisms(diagram)


def _splitting_modulus(product: ExactMatrix, h_min: int) -> Optional[int]:
    """Smallest h >= h_min with h^2 + h below every entry and no entry divisible by h."""
    smallest = product.min_entry()
    h = h_min
    while h * h + h < smallest:
        if all(x % h for x in product.entries()):
            return h
        h += 1
    return None


def build_main1(
    diagram: BratteliDiagram,
    target: ComplexityTarget,
    depth: int,
    scan_limit: int = 1_000_000,
    horizon: int = 64,
) -> ConstructionResult:
    result = ConstructionResult(MAIN1, str(target), depth)
    try:
        _run_main1(diagram, target, depth, scan_limit, horizon, result)
    except ConstructionError as e:
        result.fail(e.level, e.condition or "construction", str(e))
    except (DiagramError, MorphismError, DimensionError) as e:
        result.fail(None, type(e).__name__, str(e))
    logger.info(f"main1 construction for target {target}: {result.status()}")
    return result


def _run_main1(diagram, target, depth, scan_limit, horizon, result: ConstructionResult):
    if depth < 1:
        raise ConstructionError("depth must be at least 1", condition="depth")

    cuts = [0]
    telescoped: List[ExactMatrix] = []
    hs: List[int] = []
    levels = []
    for i in range(depth):
        m_prev = _level_size(telescoped, i - 1)
        t = 0 if i == 0 else threshold(target, _level_size(telescoped, i), i, scan_limit)
        h_min = max(t, 2 * m_prev) + 1

        def accept(product: ExactMatrix, h_min=h_min) -> bool:
            return _splitting_modulus(product, h_min) is not None

        try:
            end, product = grow_window(diagram, cuts[-1], accept, horizon)
        except DiagramError as e:
            raise ConstructionError(str(e), level=i, condition="telescoping window") from e
        h = _splitting_modulus(product, h_min)
        window = (cuts[-1], end)
        cuts.append(end)
        telescoped.append(product)
        hs.append(h)
        levels.append(LevelRecord(i, t, h=h, window=window))
        logger.info(f"Level {i}: t={t}, h={h}, window {window}, shape {product.shape}")
        if h > h_min:
            result.record(i, "h_i raised for nonzero remainders", f"{h_min} -> {h}", True, required=False)
        result.record(i, "h_i > t_i", f"{h} > {t}", h > t)
        result.record(i, "h_i > 2 m_(i-1)", f"{h} > {2 * m_prev}", h > 2 * m_prev)
        result.record(i, "h_i^2 + h_i < min entry", f"{h * h + h} < {product.min_entry()}", h * h + h < product.min_entry())
        result.record(i, "remainders nonzero", f"mod {h}", all(x % h for x in product.entries()))

    splits = [split_level(a, h) for a, h in zip(telescoped, hs)]
    for i, (a, split) in enumerate(zip(telescoped, splits)):
        result.record(i, "B_i C_i = A_i", "split", mat_mul(split.b, split.c) == a)

    primes: List[ExactMatrix] = [splits[0].c]
    for i in range(1, depth):
        primes.append(mat_mul(splits[i].c, splits[i - 1].b))

    js: List[ExactMatrix] = [ExactMatrix([[1]])]
    for i in range(1, depth + 1):
        js.append(_adapted_j(hs[i - 1], 2 * _level_size(telescoped, i - 1)))
    inverses = [invert_rational(j) for j in js]

    finals: List[ExactMatrix] = []
    bar_product = None
    prime_product = None
    final_product = None
    for i, prime in enumerate(primes):
        candidate = mat_mul(mat_mul(js[i + 1], prime), inverses[i]).to_rational()
        if not result.record(i, "A''_i integral", "J_(i+1) A'_i J_i^-1", candidate.is_integral()):
            return
        final = candidate.to_exact()
        if not result.record(i, "A''_i positive", f"min {final.min_entry()}", final.is_positive()):
            return
        first_column = min(final.column(0))
        result.record(i, "A''_i(j,1) > |V''_(i+1)|", f"{first_column} > {final.rows}", first_column > final.rows)
        odd = [x for row in final.tolist() for x in row[0::2]]
        even = [x for row in final.tolist() for x in row[1::2]] or odd
        result.record(i, "column minima (odd, even)", f"{min(odd)}, {min(even)}", True, required=False)
        if i + 1 < depth:
            result.record(
                i,
                "entries of A''_i exceed h_(i+1)",
                f"min {final.min_entry()} vs h={hs[i + 1]}",
                final.min_entry() > hs[i + 1],
                required=False,
            )
        finals.append(final)

        bar_product = telescoped[i] if bar_product is None else mat_mul(telescoped[i], bar_product)
        prime_product = prime if prime_product is None else mat_mul(prime, prime_product)
        final_product = final if final_product is None else mat_mul(final, final_product)
        result.record(i, "A_i...A_0 = B_i A'_i...A'_0", "exact", bar_product == mat_mul(splits[i].b, prime_product))
        result.record(
            i,
            "A''_i...A''_0 J_0 = J_(i+1) A'_i...A'_0",
            "exact",
            mat_mul(final_product, js[0]) == mat_mul(js[i + 1], prime_product),
        )
    if result.failed:
        return

    try:
        ordered, directive = _ordered_diagram(finals)
    except MorphismError as e:
        raise ConstructionError(str(e), condition="order precondition") from e
    for i in range(depth - 1):
        shortest = directive.min_norm(0, i + 1)
        result.record(i, "<tau_[0,i+1)> >= h_(i+1)", f"{shortest} vs {hs[i + 1]}", shortest >= hs[i + 1], required=False)

    result.diagram = ordered
    result.directive = directive
    result.a_seq = tuple(primes)
    result.j_seq = tuple(j.to_rational() for j in js)
    result.levels = tuple(levels)
    result.cuts = tuple(cuts)
    result.telescoped = tuple(telescoped)
    result.splits = tuple(splits)


@dataclass(frozen=True)
class PresplitResult:
    a_tilde: Tuple[ExactMatrix, ...]
    b: Tuple[ExactMatrix, ...]
    c: Tuple[ExactMatrix, ...]
    doubled_root: bool

    @property
    def unchanged(self) -> bool:
        return not self.doubled_root and all(c.is_square() for c in self.c)


def _balanced_split(a: ExactMatrix) -> ExactMatrix:
    return ExactMatrix([[-(-x // 2), x // 2] for x in a.column(0)])


def presplit_divisible(a_seq: Sequence[ExactMatrix]) -> PresplitResult:
    """Double every one-vertex level so that m_1 = 2, A~_0 = (1,1)^t and m_i >= 2.

    A_i = B_i C_i with C_i = (1,1)^t on one-vertex levels (and for the root
    unless A_0 is already (1,1)^t), C_i = I otherwise. Then A~_i = C_{i+1} B_i,
    preceded by C_0 when the root is doubled.
    """
    if not a_seq:
        raise DiagramError("presplit needs at least one matrix")
    for i, a in enumerate(a_seq):
        if not a.is_positive():
            raise DiagramError(f"presplit needs positive matrices; A_{i} has a zero entry")
    pair = ExactMatrix([[1], [1]])
    doubled_root = a_seq[0] != pair

    bs, cs = [], []
    for i, a in enumerate(a_seq):
        if (i == 0 and doubled_root) or (i > 0 and a.cols == 1):
            bs.append(_balanced_split(a))
            cs.append(pair)
        else:
            bs.append(a)
            cs.append(ExactMatrix.identity(a.cols))
    last = a_seq[-1].rows
    c_top = pair if last == 1 else ExactMatrix.identity(last)

    tilde = [pair] if doubled_root else []
    for i in range(len(a_seq)):
        nxt = cs[i + 1] if i + 1 < len(a_seq) else c_top
        tilde.append(mat_mul(nxt, bs[i]))

    running = None
    product = None
    for i, a in enumerate(a_seq):
        if mat_mul(bs[i], cs[i]) != a:
            raise DimensionError(f"presplit factorization of A_{i} is wrong")
        running = cs[0] if running is None else mat_mul(cs[i], mat_mul(bs[i - 1], running))
        product = a if product is None else mat_mul(a, product)
        if product != mat_mul(bs[i], running):
            raise DimensionError(f"presplit intertwining fails at level {i}")
    return PresplitResult(tuple(tilde), tuple(bs), tuple(cs) + (c_top,), doubled_root)


def build_toeplitz(
    diagram: BratteliDiagram,
    target: ComplexityTarget,
    depth: int,
    scan_limit: int = 1_000_000,
    horizon: int = 64,
) -> ConstructionResult:
    """Equal-row-sum pipeline; the caller asserts that the dimension group is divisible."""
    result = ConstructionResult(TOEPLITZ, str(target), depth)
    try:
        _run_toeplitz(diagram, target, depth, scan_limit, horizon, result)
    except ConstructionError as e:
        result.fail(e.level, e.condition or "construction", str(e))
    except (DiagramError, MorphismError, DimensionError) as e:
        result.fail(None, type(e).__name__, str(e))
    logger.info(f"toeplitz construction for target {target}: {result.status()}")
    return result


def _toeplitz_windows(diagram: BratteliDiagram, depth: int, horizon: int) -> Tuple[List[int], List[ExactMatrix]]:
    """Positive windows; one-column products also need entries >= 2 so the halves stay positive."""
    pair = ExactMatrix([[1], [1]])

    def accept(product: ExactMatrix) -> bool:
        if not product.is_positive():
            return False
        return product == pair or product.cols >= 2 or product.min_entry() >= 2

    cuts, windows = [0], []
    needed = depth + 1
    while len(windows) < needed:
        end, product = grow_window(diagram, cuts[-1], accept, horizon)
        cuts.append(end)
        windows.append(product)
        if len(windows) == 1 and product != pair:
            needed = depth
    return cuts, windows


def _run_toeplitz(diagram, target, depth, scan_limit, horizon, result: ConstructionResult):
    if depth < 2:
        raise ConstructionError("the Toeplitz pipeline needs depth >= 2", condition="depth")
    try:
        cuts, windows = _toeplitz_windows(diagram, depth, horizon)
    except DiagramError as e:
        raise ConstructionError(str(e), level=0, condition="telescoping window") from e

    presplit = presplit_divisible(windows)
    tilde = presplit.a_tilde[: depth + 1]
    result.record(0, "presplit intertwining", "A_i...A_0 = B_i C_i B_(i-1)...C_0", True)
    result.record(0, "A~_0 = (1,1)^t", tilde[0], tilde[0] == ExactMatrix([[1], [1]]))
    for i, a in enumerate(tilde[1:], start=1):
        result.record(i, "A~_i positive", f"min {a.min_entry()}", a.is_positive())
    if result.failed:
        return

    js: List[RationalMatrix] = [RationalMatrix.identity(1), RationalMatrix.identity(2)]
    bs: List[ExactMatrix] = [tilde[0]]
    ks = [1]
    periods = []
    levels = [LevelRecord(1, 0, k=1)]
    for i in range(2, depth + 1):
        m_i = tilde[i - 1].rows
        m_next = tilde[i].rows
        x = mat_mul(tilde[i - 1], invert_rational(js[i - 1])).to_rational()
        sums = x.row_sums()
        if any(s <= 0 for s in sums):
            raise ConstructionError("row normalization impossible: nonpositive row sum", level=i, condition="row normalization")
        j_prime = RationalMatrix.diagonal([1 / Fraction(s) for s in sums])
        y = mat_mul(j_prime, x)
        s_i = lcm_denominators(y)
        t_i = threshold(target, m_next, i + 1, scan_limit)
        smallest = y.min_entry()
        l_i = max(1, t_i // (i * s_i) + 1, int(Fraction(m_i) / (i * s_i * smallest)) + 1)
        k_i = i * s_i * l_i
        j_i = j_prime.scale(k_i)
        b = mat_mul(mat_mul(j_i, tilde[i - 1]), invert_rational(js[i - 1])).to_rational()
        logger.info(f"Level {i}: t={t_i}, s={s_i}, l={l_i}, k={k_i}")
        levels.append(LevelRecord(i, t_i, k=k_i, s=s_i, l=l_i))

        if not result.record(i, "B_(i-1) integral", "J_i A~_(i-1) J_(i-1)^-1", b.is_integral(), index=i - 1):
            return
        b = b.to_exact()
        ers = is_ers(b)
        result.record(i, "B_(i-1) ERS with row sum k_i", f"{ers.row_sum} vs {k_i}", ers.flag and ers.row_sum == k_i, index=i - 1)
        result.record(i, "B_(i-1) divisible by i", i, is_divisible(b, i), index=i - 1)
        result.record(i, "entries of B_(i-1) > m_i", f"{b.min_entry()} > {m_i}", b.min_entry() > m_i, index=i - 1)
        result.record(i, "k_i > t_i", f"{k_i} > {t_i}", k_i > t_i, index=i - 1)
        js.append(j_i)
        bs.append(b)
        ks.append(k_i)
        product = 1
        for k in ks:
            product *= k
        periods.append(product)
    if result.failed:
        return

    try:
        ordered, directive = _ordered_diagram(bs)
    except MorphismError as e:
        raise ConstructionError(str(e), condition="order precondition") from e

    result.diagram = ordered
    result.directive = directive
    result.a_seq = tuple(tilde[:depth])
    result.j_seq = tuple(js)
    result.levels = tuple(levels)
    result.cuts = tuple(cuts)
    result.telescoped = tuple(windows)
    result.periods = tuple(periods)


@dataclass(frozen=True)
class BoundRow:
    n: int
    p: int
    bound: int
    regime: str
    level: int
    coarse: Optional[int]


@dataclass
class VerificationReport:
    mode: str
    skipped: bool = False
    profile: Optional[ComplexityProfile] = None
    bounds: Tuple[BoundRow, ...] = ()
    decade_maxima: Tuple[Tuple[int, Fraction], ...] = ()
    decades_decreasing: Optional[bool] = None
    adapted: Optional[AdaptedReport] = None
    recognizability: Tuple[Tuple[int, RecognizabilityReport], ...] = ()
    prefix: Optional[PrefixStability] = None
    toeplitz: Optional[ToeplitzReport] = None
    boshernitzan: Optional[BoshernitzanEstimate] = None
    constants: Dict[str, int] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.skipped and not self.failures

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIPPED"
        return "PASS" if self.passed else "FAIL"


def _decade_maxima(profile: ComplexityProfile, target: ComplexityTarget) -> List[Tuple[int, Fraction]]:
    maxima: Dict[int, Fraction] = {}
    for n, p in profile.items():
        if target.horizon is not None and n > target.horizon:
            break
        decade = 10 ** (len(str(n)) - 1)
        key = target.ratio_key(p, n)
        if decade not in maxima or key > maxima[decade]:
            maxima[decade] = key
    return sorted(maxima.items())


def verify_construction(
    res: ConstructionResult,
    target: ComplexityTarget,
    n_max: int = 1000,
    recognizability_window: int = 4,
    random_samples: int = 8,
    random_length: int = 8,
    seed: int = 0,
    toeplitz_window: int = 10_000,
    max_hole_density: Fraction = Fraction(1, 4),
) -> VerificationReport:
    report = VerificationReport(res.mode)
    if res.failed or res.directive is None:
        report.skipped = True
        logger.info("Verification skipped: construction FAILED")
        return report
    ds = res.directive
    if res.mode == MAIN1:
        report.constants = {
            "regime_I": COARSE_REGIME_I,
            "regime_J": COARSE_REGIME_J,
            "absorbed_I": MAIN1_REGIME_I_CONSTANT,
            "absorbed_J": MAIN1_REGIME_J_CONSTANT,
        }
    else:
        report.constants = {"regime_I": COARSE_REGIME_I, "regime_J": COARSE_REGIME_J, "absorbed": TOEPLITZ_CONSTANT}

    try:
        profile = complexity_profile(ds, n_max)
    except LanguageError as e:
        report.failures.append(f"complexity profile: {e}")
        return report
    report.profile = profile
    if profile.partial:
        report.failures.append(f"factor sets of length {n_max} did not stabilize within depth {ds.depth}; p(n) is only a lower bound")

    report.prefix = prefix_stability(ds, 0, n_max)
    if report.prefix.stable is False:
        report.failures.append(f"prefixes of length {report.prefix.length} depend on the top letter despite left-proper levels")

    rows = []
    for n, p in profile.items():
        if n < ds.norm(0, 1):
            continue
        try:
            value = complexity_bound(ds, n)
        except LanguageError as e:
            report.failures.append(f"bound at n={n}: {e}")
            break
        rows.append(BoundRow(n, p, value.bound, value.regime, value.level, value.coarse))
        if p > value.bound:
            report.failures.append(f"p({n})={p} exceeds the complexity bound {value.bound}")
        if value.coarse is not None and p > value.coarse:
            report.failures.append(f"p({n})={p} exceeds the coarse bound {value.coarse}")
    report.bounds = tuple(rows)
    if res.mode == TOEPLITZ and any(row.regime != "I" for row in rows):
        report.failures.append("equal row sums should keep every n in regime I")

    maxima = _decade_maxima(profile, target)
    report.decade_maxima = tuple(maxima)
    report.decades_decreasing = all(b[1] < a[1] for a, b in zip(maxima, maxima[1:]))
    if not report.decades_decreasing:
        report.notes.append("per-decade maxima of p(n)/p_n are not strictly decreasing on this horizon")

    report.adapted = verify_adapted(res.a_seq, res.j_seq)
    for level in report.adapted.levels:
        stored = res.diagram.incidences[level.level]
        if not level.b_integral:
            report.failures.append(f"adapted condition (2) at level {level.level}: J_(i+1) A_i J_i^-1 not integral")
        elif not level.b_positive:
            report.failures.append(f"adapted condition (2) at level {level.level}: J_(i+1) A_i J_i^-1 not positive")
        elif level.b.to_exact() != stored:
            report.failures.append(f"adapted condition (2) at level {level.level}: J_(i+1) A_i J_i^-1 differs from the stored incidence")
        if level.smallest_m is None:
            message = f"adapted condition (1) at level {level.level}: no M within horizon"
            if res.mode == MAIN1:
                report.failures.append(message)
            else:
                report.notes.append(message + " (divisible case relies on equal row sums)")

    checks = []
    for i in range(1, ds.depth):
        tau = ds[i]
        # With at least three letters the marker alone pins down the cutting points.
        words = () if tau.codomain >= 3 and not marker_violations(tau) else None
        rec = verify_recognizability(tau, words, recognizability_window, random_samples, random_length, seed)
        checks.append((i, rec))
        if not rec.decoding_unique:
            report.failures.append(f"tau_{i}: {len(rec.ambiguous)} sampled words decode ambiguously")
        if not rec.marker_holds:
            if tau.codomain == 2:
                logger.warning(f"tau_{i}: two-letter level, marker u_2 u_1 also occurs inside images; decoding check only")
            else:
                report.failures.append(f"tau_{i}: marker u_m u_1 occurs away from cutting points")
    report.recognizability = tuple(checks)

    if res.mode == TOEPLITZ:
        for i, b in enumerate(res.diagram.incidences[1:], start=1):
            ers = is_ers(b)
            if not ers.flag:
                report.failures.append(f"B_{i} does not have equal row sums")
            if not is_divisible(b, i + 1):
                report.failures.append(f"B_{i} is not divisible by {i + 1}")
        length = min(toeplitz_window, ds.lengths(0, ds.depth)[0])
        window = generate_word(ds, 0, 1, length)
        report.toeplitz = toeplitz_check(window, res.periods, max_hole_density)
        if not report.toeplitz.flag:
            report.failures.append(f"Toeplitz check failed on a {length}-letter window")
        elif not report.toeplitz.strict:
            report.notes.append(f"{len(report.toeplitz.unverified)} of {length} positions carry no verified period")

    report.boshernitzan = boshernitzan_bound(profile)
    for failure in report.failures[:1]:
        logger.error(f"Verification: {failure}")
    logger.info(f"Verification of {res.mode} result: {report.status}")
    return report


def construct(
    mode: str,
    diagram: BratteliDiagram,
    target: ComplexityTarget,
    depth: int,
    scan_limit: int = 1_000_000,
    horizon: int = 64,
) -> ConstructionResult:
    builders = {MAIN1: build_main1, TOEPLITZ: build_toeplitz}
    if mode not in builders:
        raise SadicError(f"unknown construction mode {mode!r}")
    return builders[mode](diagram, target, depth, scan_limit, horizon)
