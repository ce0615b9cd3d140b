"""Complexity targets p_n and their expression grammar.

Supported expressions:

    n^<rational>          e.g. "n^1.5", "n^3/2", "n^2", "n"
    n*log2(n)^<int>       n * ceil(log2 n)^beta (ceil(log2 1) taken as 1)
    @table.csv            explicit values, rows "n,p" for n = 1, 2, ...

All comparisons against p_n are exact; irrational powers are compared through
integer powers.
"""
import csv
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple, Union

from .errors import TargetError

logger = logging.getLogger("sadic-builder")

_POWER = re.compile(r"^n(?:\s*\^\s*(?P<alpha>[0-9]+(?:\.[0-9]+)?(?:\s*/\s*[0-9]+)?))?$")
_LOG = re.compile(r"^n\s*\*\s*log2\s*\(\s*n\s*\)(?:\s*\^\s*(?P<beta>[0-9]+))?$")


def _ceil_log2(n: int) -> int:
    return max(1, (n - 1).bit_length())


@dataclass(frozen=True)
class ComplexityTarget:
    """One of three families: ``power`` (n^alpha), ``log`` (n ceil(log2 n)^beta) or ``table``."""

    kind: str
    expression: str
    alpha: Optional[Fraction] = None
    beta: Optional[int] = None
    table: Tuple[Fraction, ...] = field(default_factory=tuple)

    @property
    def monotone_from(self) -> Optional[int]:
        """n0 after which p_n / n is nondecreasing, when known."""
        if self.kind == "power":
            return 1 if self.alpha >= 1 else None
        if self.kind == "log":
            return 1
        return None

    @property
    def horizon(self) -> Optional[int]:
        """Largest n the target is defined at (tables only)."""
        return len(self.table) if self.kind == "table" else None

    def _check_n(self, n: int):
        if n < 1:
            raise TargetError(f"targets are evaluated at positive integers, got {n}")
        if self.kind == "table" and n > len(self.table):
            raise TargetError(f"table target {self.expression} has no value at n={n}")

    def exact_value(self, n: int) -> Optional[Fraction]:
        """p_n when it is rational, else None."""
        self._check_n(n)
        if self.kind == "table":
            return self.table[n - 1]
        if self.kind == "log":
            return Fraction(n * _ceil_log2(n) ** self.beta)
        if self.alpha.denominator == 1:
            return Fraction(n ** self.alpha.numerator)
        return None

    def approx(self, n: int) -> float:
        exact = self.exact_value(n)
        if exact is not None:
            return float(exact)
        return float(n) ** float(self.alpha)

    def greater_than(self, n: int, x: Union[int, Fraction]) -> bool:
        """p_n > x, decided exactly."""
        x = Fraction(x)
        exact = self.exact_value(n)
        if exact is not None:
            return exact > x
        if x < 0:
            return True
        a, b = self.alpha.numerator, self.alpha.denominator
        # n^(a/b) > p/q  <=>  n^a q^b > p^b
        return n ** a * x.denominator ** b > x.numerator ** b

    def ratio_key(self, p: int, n: int) -> Fraction:
        """A rational that orders like p / p_n."""
        exact = self.exact_value(n)
        if exact is not None:
            return Fraction(p) / exact
        a, b = self.alpha.numerator, self.alpha.denominator
        return Fraction(p ** b, n ** a)

    def __str__(self) -> str:
        return self.expression


def parse_target(expression: str, base_dir: Optional[Path] = None) -> ComplexityTarget:
    text = expression.strip()
    if not text:
        raise TargetError("empty target expression")

    if text.startswith("@"):
        path = Path(text[1:])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return _load_table(path, text)

    match = _LOG.match(text)
    if match:
        beta = int(match.group("beta") or 1)
        if beta < 1:
            raise TargetError(f"log exponent must be at least 1 in {expression!r}")
        return ComplexityTarget("log", text, beta=beta)

    match = _POWER.match(text)
    if match:
        raw = (match.group("alpha") or "1").replace(" ", "")
        try:
            alpha = Fraction(raw)
        except (ValueError, ZeroDivisionError) as e:
            raise TargetError(f"invalid exponent in {expression!r}: {e}") from e
        if alpha <= 0:
            raise TargetError(f"exponent must be positive in {expression!r}")
        if alpha <= 1:
            logger.warning(f"Target {text} is not superlinear; the construction will not reach its thresholds")
        return ComplexityTarget("power", text, alpha=alpha)

    raise TargetError(f"cannot parse target {expression!r}; expected n^<rational>, n*log2(n)^<int> or @table.csv")


def _load_table(path: Path, expression: str) -> ComplexityTarget:
    try:
        with open(path, newline="") as f:
            rows = [row for row in csv.reader(f) if row and any(cell.strip() for cell in row)]
    except OSError as e:
        raise TargetError(f"cannot read target table {path}: {e}") from e
    if rows and rows[0][0].strip().lower() == "n":
        rows = rows[1:]
    values = []
    for expected, row in enumerate(rows, start=1):
        if len(row) < 2:
            raise TargetError(f"{path}: row {expected} needs two columns n,p")
        try:
            n = int(row[0])
            p = Fraction(row[1].strip())
        except (ValueError, ZeroDivisionError) as e:
            raise TargetError(f"{path}: invalid row {row}: {e}") from e
        if n != expected:
            raise TargetError(f"{path}: rows must list n = 1, 2, ... in order (got {n}, expected {expected})")
        if p <= 0:
            raise TargetError(f"{path}: p_{n} must be positive")
        values.append(p)
    if not values:
        raise TargetError(f"{path}: empty target table")
    return ComplexityTarget("table", expression, table=tuple(values))
