"""The two worked examples shipped as data files.

``exam``: 3 teachers grading 6 answers on 5 hierarchical feedback items.
``dsm``: 27 child psychiatric cases, 3 or 4 diagnosticians each, 20 DSM-III
Axis I categories.
"""

from importlib import resources

from ..baselines import RankingTable, build_rankings, parse_rankings
from ..data import ClassificationTensor, build_tensor, parse_categories, parse_ratings, parse_roster
from ..hierarchy import parse_hierarchy


def path(name: str):
    return resources.files(__name__).joinpath(name)


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def exam_tensor() -> ClassificationTensor:
    return build_tensor(parse_ratings(read("exam.csv")), categories=parse_categories(read("exam_categories.txt")))


def exam_rules():
    return parse_hierarchy(read("exam_hierarchy.json"))


def exam_weights():
    from ..kappa import parse_weights

    return parse_weights(read("exam_weights.json"), parse_categories(read("exam_categories.txt")))


def dsm_tensor() -> ClassificationTensor:
    return build_tensor(
        parse_ratings(read("dsm.csv")),
        roster=parse_roster(read("dsm_roster.csv")),
        categories=parse_categories(read("dsm_categories.txt")),
    )


def dsm_rankings() -> RankingTable:
    return build_rankings(
        parse_rankings(read("dsm_rankings.csv")),
        parse_categories(read("dsm_categories.txt")),
        roster=parse_roster(read("dsm_roster.csv")),
    )
