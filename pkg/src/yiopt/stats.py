"""
Run statistics, the one-tailed Welch t-test and win/tie/loss tables.

The Student-t CDF goes through the regularized incomplete beta function

    F(t; v) = 1 - I_x(v/2, 1/2) / 2  for t >= 0,   x = v / (v + t^2)

with ``I_x(a, b)`` evaluated by its continued fraction (modified Lentz
method), using the symmetry ``I_x(a, b) = 1 - I_{1-x}(b, a)`` whenever
``x >= (a + 1) / (a + b + 2)`` so the fraction converges quickly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = ["ComparisonCell", "ComparisonTable", "RunStats", "TTestResult",
           "betainc_regularized", "build_table", "classify", "student_t_cdf",
           "summarize", "welch_one_tail"]

WIN, TIE, LOSS = "+", "=", "-"


@dataclass(frozen=True)
class RunStats:
    n: int
    best: float
    worst: float
    mean: float
    std: float
    median: float


def summarize(errors: Iterable[float]) -> RunStats:
    e = np.asarray(list(errors), dtype=float)
    if e.size == 0:
        raise ValueError("cannot summarize an empty sample")
    e = np.sort(e)
    return RunStats(n=int(e.size), best=float(e[0]), worst=float(e[-1]),
                    mean=float(np.mean(e)),
                    std=float(np.std(e, ddof=1)) if e.size > 1 else 0.0,
                    median=float(np.median(e)))


def _betacf(a: float, b: float, x: float, max_iter: int = 500, tol: float = 1e-15) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ArithmeticError(f"incomplete beta fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)`` for ``a, b > 0``."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, dof: float) -> float:
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * betainc_regularized(dof / 2.0, 0.5, dof / (dof + t * t))
    return 1.0 - tail if t >= 0 else tail


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    dof: float
    p_one_tail: float


def welch_one_tail(a: Sequence[float], b: Sequence[float], direction: str = "less") -> TTestResult:
    """
    Welch two-sample t-test, one-tailed.

    ``direction="less"`` tests whether ``mean(a) < mean(b)``, ``"greater"``
    the opposite. Samples with fewer than two values, or with zero variance
    on both sides and equal means, give the tie fallback ``t = 0, p = 0.5``.
    Zero variance with different means gives ``t = +/-inf``.
    """
    if direction not in ("less", "greater"):
        raise ValueError("direction must be 'less' or 'greater'")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        return TTestResult(0.0, float(max(na + nb - 2, 1)), 0.5)
    ma, mb = float(np.mean(a)), float(np.mean(b))
    va, vb = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))
    qa, qb = va / na, vb / nb
    se2 = qa + qb
    if se2 == 0.0:
        dof = float(na + nb - 2)
        if ma == mb:
            return TTestResult(0.0, dof, 0.5)
        t = math.copysign(math.inf, ma - mb)
    else:
        t = (ma - mb) / math.sqrt(se2)
        dof = se2 * se2 / (qa * qa / (na - 1) + qb * qb / (nb - 1))
    cdf = student_t_cdf(t, dof)
    p = cdf if direction == "less" else student_t_cdf(-t, dof)
    return TTestResult(float(t), float(dof), float(min(max(p, 0.0), 1.0)))


def classify(candidate_errors, reference_errors, significance: float = 0.05) -> str:
    """
    ``"+"`` if the candidate's mean error is significantly smaller than the
    reference's, ``"-"`` if significantly larger, ``"="`` otherwise.
    """
    if welch_one_tail(candidate_errors, reference_errors, "less").p_one_tail < significance:
        return WIN
    if welch_one_tail(candidate_errors, reference_errors, "greater").p_one_tail < significance:
        return LOSS
    return TIE


@dataclass(frozen=True)
class ComparisonCell:
    algorithm: str
    problem: str
    stats: RunStats
    verdict: str  # "+", "=", "-" vs the reference; "" for the reference itself


@dataclass
class ComparisonTable:
    reference: str
    problems: list
    algorithms: list
    cells: dict  # (algorithm, problem) -> ComparisonCell

    def totals(self) -> dict:
        out = {}
        for alg in self.algorithms:
            if alg == self.reference:
                continue
            verdicts = [self.cells[alg, p].verdict for p in self.problems]
            out[alg] = (verdicts.count(WIN), verdicts.count(TIE), verdicts.count(LOSS))
        return out

    def to_tsv(self) -> str:
        cols = ["problem", "algorithm", "n", "best", "worst", "mean", "std", "median", "verdict"]
        lines = ["\t".join(cols)]
        for p in self.problems:
            for alg in self.algorithms:
                c = self.cells[alg, p]
                s = c.stats
                lines.append("\t".join([p, alg, str(s.n)]
                                       + [f"{v:.6e}" for v in (s.best, s.worst, s.mean, s.std, s.median)]
                                       + [c.verdict or "ref"]))
        for alg, (w, t, l) in self.totals().items():
            lines.append(f"# w/t/l {alg} vs {self.reference}: {w}/{t}/{l}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rows = []
        for p in self.problems:
            for alg in self.algorithms:
                c = self.cells[alg, p]
                rows.append({"problem": p, "algorithm": alg, **asdict(c.stats),
                             "verdict": c.verdict})
        doc = {"reference": self.reference, "rows": rows,
               "totals": {k: {"win": w, "tie": t, "loss": l}
                          for k, (w, t, l) in self.totals().items()}}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def build_table(errors: dict, reference: str, significance: float = 0.05) -> ComparisonTable:
    """
    Build a comparison table from ``{(algorithm, problem): [final errors]}``.

    Every algorithm must have a sample for every problem; verdicts compare
    each algorithm with ``reference`` (``"+"`` meaning the algorithm is
    significantly better).
    """
    algorithms = sorted({a for a, _ in errors}, key=lambda a: (a != reference, a))
    problems = sorted({p for _, p in errors})
    if reference not in algorithms:
        raise ValueError(f"reference algorithm {reference!r} has no results")
    missing = [(a, p) for a in algorithms for p in problems if (a, p) not in errors]
    if missing:
        raise ValueError("missing comparison cells: "
                         + ", ".join(f"{a}/{p}" for a, p in missing))
    cells = {}
    for a in algorithms:
        for p in problems:
            verdict = "" if a == reference else classify(
                errors[a, p], errors[reference, p], significance)
            cells[a, p] = ComparisonCell(a, p, summarize(errors[a, p]), verdict)
    return ComparisonTable(reference, problems, algorithms, cells)
