"""Generalized Fleiss' kappa for multi-label, weighted, hierarchical categories.

Each category is treated as its own select / not-select decision.  For
category c, with ``x[i]`` raters selecting it for subject i out of ``s[i]``
raters who could have selected it::

    Po_c = sum_i [x(x-1) + (s-x)(s-x-1)] / sum_i s(s-1)
    Pe_c = 2p^2 - 2p + 1,          p = sum_i x / sum_i s
    phi_c = sum_i s / sum_i j      (j: raters who saw subject i at all)

and the categories are pooled as::

    kappa = sum_c w_c phi_c (Po_c - Pe_c) / sum_c w_c phi_c (1 - Pe_c)

Every variant (fixed raters, varying raters, hierarchical categories) is
the same kernel with a different choice of ``s``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .data import AgreementTable, ClassificationTensor, tally
from .errors import (
    AllZeroScores,
    InvalidCounts,
    InvalidWeights,
    NotMutuallyExclusive,
    UndefinedKappa,
    ZeroOpportunity,
)
from .hierarchy import AvailabilityRule, PossibleMatrix, compute_possible

NAN = float("nan")


def _columns(x, s):
    x = np.asarray(x)
    s = np.asarray(s)
    if x.shape != s.shape:
        raise InvalidCounts(f"shape mismatch {x.shape} vs {s.shape}")
    if np.any(x != np.round(x)) or np.any(s != np.round(s)):
        raise InvalidCounts("counts must be whole numbers")
    x = [int(v) for v in np.ravel(x)]
    s = [int(v) for v in np.ravel(s)]
    if any(a < 0 or a > b for a, b in zip(x, s)):
        raise InvalidCounts("need 0 <= x <= s for every subject")
    return x, s


# Po and Pe are ratios of integer sums; keeping them as Fractions until the
# end makes every reported value correctly rounded and order independent.

def _po_exact(x, s) -> Fraction | None:
    x, s = _columns(x, s)
    den = sum(b * (b - 1) for b in s)
    if den == 0:
        return None
    return Fraction(sum(a * (a - 1) + (b - a) * (b - a - 1) for a, b in zip(x, s)), den)


def _pe_exact(x, s) -> Fraction | None:
    x, s = _columns(x, s)
    total = sum(s)
    if total == 0:
        return None
    hits = sum(x)
    return Fraction(hits * hits + (total - hits) ** 2, total * total)


def _float(v) -> float:
    return NAN if v is None else float(v)


def po_per_category(x, s) -> float:
    """Observed agreement; NaN when no subject offers a rater pair."""
    return _float(_po_exact(x, s))


def pe_per_category(x, s) -> float:
    """Chance agreement ``2p^2 - 2p + 1``; NaN when the category was never available."""
    return _float(_pe_exact(x, s))


def scale_factors(possible: PossibleMatrix) -> np.ndarray:
    s_tot = possible.s.sum(axis=0)
    j_tot = possible.j_prime.sum(axis=0)
    if np.any(j_tot == 0):
        raise ZeroOpportunity("a category had no rater opportunity on any subject")
    return np.array([float(Fraction(int(a), int(b))) for a, b in zip(s_tot, j_tot)])


def _undefined(v) -> bool:
    return v is None or (isinstance(v, float) and math.isnan(v))


def kappa_per_category(po, pe) -> float:
    """``(po - pe) / (1 - pe)``; accepts floats or Fractions, NaN when undefined."""
    if _undefined(po) or _undefined(pe) or pe == 1:
        return NAN
    return float((po - pe) / (1 - pe))


def interpret_kappa(value: float) -> str:
    """Landis & Koch (1977) verbal label."""
    if math.isnan(value):
        return "Undefined"
    if value < 0:
        return "Poor"
    if value <= 0.20:
        return "Slight"
    if value <= 0.40:
        return "Fair"
    if value <= 0.60:
        return "Moderate"
    if value <= 0.80:
        return "Substantial"
    return "Almost Perfect"


@dataclass(frozen=True)
class CategoryAgreement:
    category: str
    po: float
    pe: float
    kappa_c: float
    phi: float
    weight: float
    num_contrib: float
    den_contrib: float


@dataclass(frozen=True)
class KappaReport:
    per_category: tuple[CategoryAgreement, ...]
    overall: float
    numerator: float
    denominator: float
    interpretation: str | None = None


def aggregate_kappa(per_category: Sequence[tuple[float, float, float, float]],
                    categories: Sequence[str] | None = None) -> KappaReport:
    """Pool ``(w_c, phi_c, po_c, pe_c)`` tuples into the overall kappa.

    Po and Pe may be floats or Fractions; NaN or None marks them undefined.
    Categories with undefined Po, Pe or kappa_c add nothing to either sum.
    """
    if categories is None:
        categories = [str(k + 1) for k in range(len(per_category))]
    rows = []
    num = 0.0
    den = 0.0
    for cat, (w, phi, po, pe) in zip(categories, per_category):
        if w < 0:
            raise InvalidWeights(f"negative weight for category {cat!r}")
        k = kappa_per_category(po, pe)
        if math.isnan(k):
            # undefined kappa_c rows carry no weight in either sum
            nc = dc = 0.0
        else:
            nc = w * phi * float(po - pe)
            dc = w * phi * float(1 - pe)
        num += nc
        den += dc
        rows.append(CategoryAgreement(cat, _float(po) if not isinstance(po, float) else po,
                                      _float(pe) if not isinstance(pe, float) else pe,
                                      k, float(phi), float(w), nc, dc))
    if den <= 0:
        raise UndefinedKappa("overall kappa undefined: pooled denominator is 0")
    overall = num / den
    return KappaReport(tuple(rows), overall, num, den, interpret_kappa(overall))


def score_weights(scores) -> np.ndarray:
    """Weights in [0.5, 1] from signed partial scores.

    ``w_c = (|score_c| + max|score|) / (2 max|score|)``: an item that never
    changes the grade still counts half.
    """
    a = np.abs(np.asarray(scores, dtype=np.float64))
    top = a.max(initial=0.0)
    if top == 0:
        raise AllZeroScores("at least one score must be nonzero")
    return (a + top) / (2 * top)


def generalized_kappa(tensor: ClassificationTensor, rules: Sequence[AvailabilityRule] | None = None,
                      weights: Sequence[float] | Mapping[str, float] | None = None) -> KappaReport:
    """Overall and per-category agreement for a tensor.

    ``weights`` is a sequence aligned with ``tensor.categories`` or a mapping
    from category id (missing ids weigh 1).  Without ``rules`` every category
    is always available and all scale factors are 1.
    """
    table = tally(tensor)
    if rules:
        possible = compute_possible(tensor, rules)
    else:
        opp = table.opportunities
        possible = PossibleMatrix(opp, opp)
    w = resolve_weights(weights, tensor.categories)
    phi = scale_factors(possible)
    x = table.counts
    cols = []
    for c in range(len(tensor.categories)):
        cols.append((
            float(w[c]),
            float(phi[c]),
            _po_exact(x[:, c], possible.s[:, c]),
            _pe_exact(x[:, c], possible.s[:, c]),
        ))
    return aggregate_kappa(cols, tensor.categories)


def resolve_weights(weights, categories: Sequence[str]) -> np.ndarray:
    if weights is None:
        return np.ones(len(categories))
    if isinstance(weights, Mapping):
        w = np.array([float(weights.get(c, 1.0)) for c in categories])
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(categories),):
            raise InvalidWeights(f"expected {len(categories)} weights, got {w.shape}")
    if np.any(w < 0) or not np.any(w > 0):
        raise InvalidWeights("weights must be nonnegative with at least one positive")
    return w


def fleiss_agreement(table: AgreementTable) -> tuple[float, float]:
    """Fleiss' ``(Po, Pe)`` for mutually exclusive categories and a fixed rater count."""
    if table.kind != "fixed":
        raise NotMutuallyExclusive("Fleiss' kappa needs every rater to rate every subject")
    x = table.counts.astype(np.float64)
    J = table.rater_counts
    if np.any(x.sum(axis=1) != J):
        bad = int(np.flatnonzero(x.sum(axis=1) != J)[0])
        raise NotMutuallyExclusive(
            f"subject row {bad} has {int(x[bad].sum())} selections for {J} raters"
        )
    I = x.shape[0]
    po = (np.sum(x * x) - I * J) / (I * J * (J - 1))
    pe = np.sum((x.sum(axis=0) / (I * J)) ** 2)
    return float(po), float(pe)


def fleiss_kappa(table: AgreementTable) -> float:
    po, pe = fleiss_agreement(table)
    if pe == 1:
        raise UndefinedKappa("Fleiss' kappa undefined: all ratings in one category")
    return (po - pe) / (1 - pe)


def parse_weights(text: str, categories: Sequence[str]) -> np.ndarray:
    """Read ``weights.json``: ``{id: weight}`` or ``{"scores": {id: score}}``.

    Plain weights default to 1 for unlisted categories.  The score form must
    cover every category, since a score's weight depends on the maximum score.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidWeights(f"invalid weights JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidWeights("weights file must hold a JSON object")
    if set(doc) == {"scores"} and isinstance(doc["scores"], dict):
        scores = doc["scores"]
        extra = set(scores) - set(categories)
        missing = [c for c in categories if c not in scores]
        if extra or missing:
            raise InvalidWeights(f"scores must list exactly the categories (extra={sorted(extra)}, missing={missing})")
        return score_weights([float(scores[c]) for c in categories])
    extra = set(doc) - set(categories)
    if extra:
        raise InvalidWeights(f"weights for unknown categories {sorted(extra)}")
    return resolve_weights({k: float(v) for k, v in doc.items()}, categories)
