"""Category availability rules and the possible-classification matrix.

A rule gates one category on the *same rater's* selections for the *same
subject*, e.g. "item5 may only be ticked if item4 was".  From the rules we
count, per subject and category, how many raters actually had the category
available (``s``) next to how many raters looked at the subject at all
(``j_prime``).

Rules are written as JSON::

    [{"category": "item4", "requires": {"all": [{"selected": "item1"},
                                                {"selected": "item3"}]}},
     {"category": "item5", "requires": {"selected": "item4"}}]

``requires`` accepts ``true``, ``{"selected": id}``, ``{"all": [...]}``,
``{"any": [...]}`` and ``{"not": pred}``.  Categories without an entry are
always available.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Sequence, Union

import numpy as np

from .data import ClassificationTensor
from .errors import (
    CyclicDependency,
    HierarchyViolation,
    MalformedPredicate,
    UnknownCategoryReference,
)


@dataclass(frozen=True)
class Always:
    def refs(self):
        return frozenset()

    def mask(self, sel, index):
        return np.ones(sel.shape[:-1], dtype=bool)


@dataclass(frozen=True)
class Selected:
    category: str

    def refs(self):
        return frozenset([self.category])

    def mask(self, sel, index):
        return sel[..., index[self.category]].astype(bool)


@dataclass(frozen=True)
class All:
    terms: tuple

    def refs(self):
        return frozenset().union(*(t.refs() for t in self.terms))

    def mask(self, sel, index):
        out = np.ones(sel.shape[:-1], dtype=bool)
        for t in self.terms:
            out &= t.mask(sel, index)
        return out


@dataclass(frozen=True)
class Any:
    terms: tuple

    def refs(self):
        return frozenset().union(*(t.refs() for t in self.terms))

    def mask(self, sel, index):
        out = np.zeros(sel.shape[:-1], dtype=bool)
        for t in self.terms:
            out |= t.mask(sel, index)
        return out


@dataclass(frozen=True)
class Not:
    term: object

    def refs(self):
        return self.term.refs()

    def mask(self, sel, index):
        return ~self.term.mask(sel, index)


Predicate = Union[Always, Selected, All, Any, Not]
ALWAYS = Always()


@dataclass(frozen=True)
class AvailabilityRule:
    category: str
    predicate: Predicate


def parse_predicate(obj) -> Predicate:
    if obj is True:
        return ALWAYS
    if not isinstance(obj, dict) or len(obj) != 1:
        raise MalformedPredicate(f"cannot interpret predicate {obj!r}")
    (key, val), = obj.items()
    if key == "selected":
        if not isinstance(val, str) or not val:
            raise MalformedPredicate(f"'selected' needs a category id, got {val!r}")
        return Selected(val)
    if key in ("all", "any"):
        if not isinstance(val, list) or not val:
            raise MalformedPredicate(f"{key!r} needs a non-empty list")
        terms = tuple(parse_predicate(v) for v in val)
        return All(terms) if key == "all" else Any(terms)
    if key == "not":
        return Not(parse_predicate(val))
    raise MalformedPredicate(f"unknown predicate operator {key!r}")


def parse_hierarchy(text: str) -> list[AvailabilityRule]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedPredicate(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise MalformedPredicate("hierarchy file must hold a JSON array")
    rules = []
    seen = set()
    for k, entry in enumerate(doc):
        if not isinstance(entry, dict) or set(entry) != {"category", "requires"}:
            raise MalformedPredicate(f"entry {k}: expected keys 'category' and 'requires'")
        cat = entry["category"]
        if not isinstance(cat, str) or not cat:
            raise MalformedPredicate(f"entry {k}: bad category id {cat!r}")
        if cat in seen:
            raise MalformedPredicate(f"entry {k}: second rule for {cat!r}")
        seen.add(cat)
        rules.append(AvailabilityRule(cat, parse_predicate(entry["requires"])))
    return rules


def rules_by_category(rules: Sequence[AvailabilityRule], categories: Sequence[str]) -> dict[str, Predicate]:
    """Full category -> predicate map, ALWAYS for categories without a rule."""
    table = {c: ALWAYS for c in categories}
    table.update({r.category: r.predicate for r in rules})
    return table


def validate_rules(rules: Sequence[AvailabilityRule], categories: Sequence[str]) -> list[str]:
    """Check references and acyclicity; return the categories in dependency order."""
    known = set(categories)
    graph = {}
    for r in rules:
        if r.category not in known:
            raise UnknownCategoryReference(f"rule for unknown category {r.category!r}")
        missing = r.predicate.refs() - known
        if missing:
            raise UnknownCategoryReference(
                f"rule for {r.category!r} references unknown {sorted(missing)}"
            )
        graph[r.category] = set(r.predicate.refs())
    for c in categories:
        graph.setdefault(c, set())
    try:
        return list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise CyclicDependency(exc.args[1]) from None


def eval_availability(predicate: Predicate, selection, categories: Sequence[str]) -> bool:
    """Is a category gated by ``predicate`` available to a rater with this selection vector?"""
    index = {c: k for k, c in enumerate(categories)}
    return bool(predicate.mask(np.asarray(selection, dtype=bool), index))


@dataclass(frozen=True, eq=False)
class PossibleMatrix:
    s: np.ndarray
    j_prime: np.ndarray


def compute_possible(tensor: ClassificationTensor, rules: Sequence[AvailabilityRule] = ()) -> PossibleMatrix:
    validate_rules(rules, tensor.categories)
    index = {c: k for k, c in enumerate(tensor.categories)}
    preds = rules_by_category(rules, tensor.categories)
    sel = tensor.selections
    part = tensor.participation
    s = np.empty(sel.shape[0::2], dtype=np.int64)
    for c, cat in enumerate(tensor.categories):
        avail = preds[cat].mask(sel, index) & part
        bad = sel[:, :, c] & ~avail
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise HierarchyViolation(tensor.subjects[i], tensor.raters[j], cat)
        s[:, c] = avail.sum(axis=1)
    j_prime = np.repeat(part.sum(axis=1)[:, None], sel.shape[2], axis=1).astype(np.int64)
    s.setflags(write=False)
    j_prime.setflags(write=False)
    return PossibleMatrix(s, j_prime)


def rule_to_json(predicate: Predicate):
    if isinstance(predicate, Always):
        return True
    if isinstance(predicate, Selected):
        return {"selected": predicate.category}
    if isinstance(predicate, (All, Any)):
        key = "all" if isinstance(predicate, All) else "any"
        return {key: [rule_to_json(t) for t in predicate.terms]}
    return {"not": rule_to_json(predicate.term)}
