"""Earlier multi-label agreement measures, for comparison.

* averaged / pooled Cohen's kappa over per-category 2x2 tables (two raters),
* Mezzich's proportional overlap (Jaccard between selection sets),
* chance-corrected intraclass correlations (one-way ANOVA ICC),
* Kraemer's chance-corrected rank correlations (Spearman on ranked lists).

The last three share a shape: ``Po`` averages a pairwise similarity over the
rater pairs of each subject, ``Pe`` averages it over every pair of cells of
the subject x rater grid, and ``kappa = (Po - Pe) / (1 - Pe)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .data import ClassificationTensor, _read_rows
from .errors import (
    DuplicateCategory,
    MalformedRow,
    NoValidPairs,
    NotTwoRaters,
    OutOfRange,
    RecordOutsideRoster,
    UndefinedKappa,
    UnknownCategory,
)

NAN = float("nan")


class Agreement(NamedTuple):
    po: float
    pe: float
    kappa: float


def _kappa(po, pe):
    if math.isnan(po) or math.isnan(pe) or pe == 1:
        return NAN
    return (po - pe) / (1 - pe)


# -- Cohen -------------------------------------------------------------------

def cohen_kappa(a, b) -> Agreement:
    """Cohen's kappa for two raters' binary select/not-select vectors."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise NotTwoRaters("need two equally long, non-empty binary vectors")
    po = float(np.mean(a == b))
    pa, pb = a.mean(), b.mean()
    pe = float(pa * pb + (1 - pa) * (1 - pb))
    return Agreement(po, pe, _kappa(po, pe))


def _two_rater_columns(tensor: ClassificationTensor):
    if len(tensor.raters) != 2:
        raise NotTwoRaters(f"Cohen's kappa needs exactly 2 raters, got {len(tensor.raters)}")
    both = tensor.participation.all(axis=1)
    if not both.any():
        raise NotTwoRaters("no subject was rated by both raters")
    sel = tensor.selections[both]
    return [cohen_kappa(sel[:, 0, c], sel[:, 1, c]) for c in range(sel.shape[2])]


def averaged_cohen(tensor: ClassificationTensor) -> float:
    """Mean of per-category Cohen's kappas; NaN if any of them is undefined."""
    ks = [r.kappa for r in _two_rater_columns(tensor)]
    if any(math.isnan(k) for k in ks):
        return NAN
    return float(np.mean(ks))


def pooled_cohen(tensor: ClassificationTensor) -> Agreement:
    rows = _two_rater_columns(tensor)
    po = float(np.mean([r.po for r in rows]))
    pe = float(np.mean([r.pe for r in rows]))
    if pe == 1:
        raise UndefinedKappa("pooled Cohen's kappa undefined: mean Pe is 1")
    return Agreement(po, pe, (po - pe) / (1 - pe))


# -- grid machinery shared by the pairwise methods ------------------------------

def cell_to_subject_rater(n: int, J: int, I: int | None = None) -> tuple[int, int]:
    """Map a 1-based row-major cell number of an I x J grid to 1-based (subject, rater)."""
    if J < 1 or n < 1 or (I is not None and n > I * J):
        raise OutOfRange(f"cell {n} outside grid of {I} x {J}")
    return -(-n // J), (n - 1) % J + 1


def _pairwise_agreement(grid: Sequence[Sequence[object]], sim: Callable[[object, object], float]) -> Agreement:
    """Po/Pe over a subject x rater grid; ``None`` cells are absent, NaN similarities skipped."""
    I = len(grid)
    J = len(grid[0]) if I else 0
    subject_means = []
    for row in grid:
        cells = [c for c in row if c is not None]
        vals = [v for v in (sim(a, b) for a, b in combinations(cells, 2)) if not math.isnan(v)]
        if vals:
            subject_means.append(math.fsum(vals) / len(vals))
    if not subject_means:
        raise NoValidPairs("no subject has a measurable rater pair")
    po = math.fsum(subject_means) / len(subject_means)

    total = 0.0
    count = 0
    n_cells = I * J
    for x in range(1, n_cells + 1):
        i, j = cell_to_subject_rater(x, J, I)
        a = grid[i - 1][j - 1]
        if a is None:
            continue
        for y in range(x + 1, n_cells + 1):
            k, l = cell_to_subject_rater(y, J, I)
            b = grid[k - 1][l - 1]
            if b is None:
                continue
            v = sim(a, b)
            if not math.isnan(v):
                total += v
                count += 1
    if count == 0:
        raise NoValidPairs("no measurable pair of cells for chance agreement")
    pe = total / count
    return Agreement(po, pe, _kappa(po, pe))


# -- proportional overlap ---------------------------------------------------------

def jaccard_overlap(a, b) -> float:
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return NAN
    return len(a & b) / len(union)


def mezzich_kappa(tensor: ClassificationTensor, empty: str = "drop") -> Agreement:
    """Proportional-overlap kappa.

    ``empty="drop"`` removes raters who selected nothing for a subject from
    the grid entirely, so a subject left with fewer than two selecting raters
    does not enter ``Po``.  ``empty="pairwise"`` keeps them: an empty set
    against a non-empty one scores 0 and only empty-vs-empty pairs are skipped.
    """
    if empty not in ("drop", "pairwise"):
        raise ValueError(f"empty must be 'drop' or 'pairwise', not {empty!r}")
    grid = tensor.selection_sets()
    if empty == "drop":
        grid = [[c if c else None for c in row] for row in grid]
    return _pairwise_agreement(grid, jaccard_overlap)


# -- intraclass correlations -------------------------------------------------------

def icc_oneway(table) -> float:
    """ICC(1) for an n-targets x k-replicates table; NaN if every entry is equal."""
    m = np.asarray(table, dtype=np.float64)
    n, k = m.shape
    if n < 2 or k < 2:
        return NAN
    grand = m.mean()
    row_means = m.mean(axis=1)
    msb = k * np.sum((row_means - grand) ** 2) / (n - 1)
    msw = np.sum((m - row_means[:, None]) ** 2) / (n * (k - 1))
    den = msb + (k - 1) * msw
    if den == 0:
        return NAN
    return float((msb - msw) / den)


def icc_subject(vectors, degenerate: float = 0.0) -> float:
    """ICC between J raters' classification vectors for one subject.

    Categories are the ANOVA groups and raters the replicates.  Identical
    vectors give 1.  When every entry is the same (all raters ticked
    everything, or nothing) the ANOVA has no variance at all and
    ``degenerate`` is returned instead.
    """
    v = np.asarray(vectors, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 2:
        raise ValueError("need at least two classification vectors")
    rho = icc_oneway(v.T)
    return degenerate if math.isnan(rho) else rho


def icc_kappa(tensor: ClassificationTensor, degenerate: float = 0.0) -> Agreement:
    """Chance-corrected intraclass correlation kappa.

    ``Po`` is the mean per-subject ICC, ``Pe`` the ICC of all participating
    classification vectors pooled together.
    """
    sel = tensor.selections
    part = tensor.participation
    rhos = [icc_subject(sel[i][part[i]], degenerate) for i in range(sel.shape[0]) if part[i].sum() >= 2]
    if not rhos:
        raise NoValidPairs("no subject has two participating raters")
    po = math.fsum(rhos) / len(rhos)
    pooled = sel[part]
    pe = icc_oneway(pooled.T)
    if math.isnan(pe):
        pe = degenerate
    return Agreement(po, pe, _kappa(po, pe))


# -- rank correlations --------------------------------------------------------------

def rank_vector(groups: Sequence[Sequence[str]], categories: Sequence[str]) -> np.ndarray:
    """Ranks for an ordered list of tie groups; unlisted categories share the leftover ranks.

    >>> cats = "blue brown green pink purple orange red yellow".split()
    >>> rank_vector([["green"], ["brown", "orange", "red"], ["yellow"]], cats).tolist()
    [7.0, 3.0, 1.0, 7.0, 7.0, 3.0, 3.0, 5.0]
    """
    index = {c: k for k, c in enumerate(categories)}
    C = len(categories)
    seen = set()
    ranks = np.empty(C)
    pos = 0
    for group in groups:
        for c in group:
            if c not in index:
                raise UnknownCategory(f"ranked category {c!r} is not declared")
            if c in seen:
                raise DuplicateCategory(f"category {c!r} ranked twice")
            seen.add(c)
        # positions pos+1 .. pos+len(group)
        ranks[[index[c] for c in group]] = pos + (len(group) + 1) / 2
        pos += len(group)
    k = pos
    rest = [index[c] for c in categories if c not in seen]
    ranks[rest] = (C + k + 1) / 2
    return ranks


def spearman_tied(a, b) -> float:
    """Pearson correlation of two rank vectors; NaN when either is constant."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.size < 2:
        raise ValueError("rank vectors must have equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    saa = np.dot(da, da)
    sbb = np.dot(db, db)
    if saa == 0 or sbb == 0:
        return NAN
    return float(np.dot(da, db) / math.sqrt(saa * sbb))


@dataclass(frozen=True, eq=False)
class RankingTable:
    """Rank vectors per (subject, rater); cells absent from ``vectors`` were not rated."""

    subjects: tuple[str, ...]
    raters: tuple[str, ...]
    categories: tuple[str, ...]
    vectors: dict = field(repr=False)

    def grid(self):
        return [[self.vectors.get((s, r)) for r in self.raters] for s in self.subjects]


RANKINGS_HEADER = ("subject", "rater", "category", "rank_group")


def parse_rankings(text: str) -> list[tuple[str, str, str, int]]:
    out = []
    for line, (s, r, c, g) in _read_rows(text, RANKINGS_HEADER):
        try:
            group = int(g)
        except ValueError:
            raise MalformedRow(f"rank_group {g!r} is not an integer", line) from None
        if group < 1:
            raise MalformedRow("rank_group must be >= 1", line)
        out.append((s, r, c, group))
    return out


def build_rankings(rows, categories: Sequence[str], roster=None) -> RankingTable:
    """Group ranking rows into rank vectors over the declared ``categories``."""
    categories = tuple(categories)
    cells: dict[tuple[str, str], dict[int, list[str]]] = {}
    if roster is not None:
        for s, r in roster:
            cells.setdefault((s, r), {})
        allowed = set(map(tuple, roster))
    for s, r, c, g in rows:
        if roster is not None and (s, r) not in allowed:
            raise RecordOutsideRoster(f"ranking ({s}, {r}, {c}) has no roster entry")
        cells.setdefault((s, r), {}).setdefault(g, []).append(c)
    if roster is not None:
        subjects = list(dict.fromkeys(s for s, _ in roster))
        raters = list(dict.fromkeys(r for _, r in roster))
    else:
        subjects = sorted({s for s, _ in cells})
        raters = sorted({r for _, r in cells})
    vectors = {
        key: rank_vector([groups[g] for g in sorted(groups)], categories)
        for key, groups in cells.items()
    }
    return RankingTable(tuple(subjects), tuple(raters), categories, vectors)


def rank_kappa(table: RankingTable) -> Agreement:
    return _pairwise_agreement(table.grid(), spearman_tied)

