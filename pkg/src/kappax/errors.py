"""Exception hierarchy.

Everything raised on bad input derives from :class:`KappaxError` so the CLI
can map it to exit code 2. :class:`UndefinedKappa` is singled out (exit 3).
"""


class KappaxError(ValueError):
    """Base class for all validation failures."""


class EmptyFile(KappaxError):
    pass


class MalformedRow(KappaxError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateRecord(MalformedRow):
    pass


class DuplicatePair(MalformedRow):
    pass


class RecordOutsideRoster(KappaxError):
    pass


class UnknownCategory(KappaxError):
    pass


class DuplicateCategory(KappaxError):
    pass


class InvalidTensor(KappaxError):
    pass


class MalformedPredicate(KappaxError):
    pass


class UnknownCategoryReference(KappaxError):
    pass


class CyclicDependency(KappaxError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cyclic availability rules: " + " -> ".join(self.cycle))


class HierarchyViolation(KappaxError):
    def __init__(self, subject, rater, category):
        self.subject, self.rater, self.category = subject, rater, category
        super().__init__(
            f"rater {rater!r} selected {category!r} for subject {subject!r} "
            "although its availability rule is not satisfied"
        )


class InvalidCounts(KappaxError):
    pass


class InvalidWeights(KappaxError):
    pass


class ZeroOpportunity(KappaxError):
    pass


class UndefinedKappa(KappaxError):
    pass


class NotMutuallyExclusive(KappaxError):
    pass


class AllZeroScores(KappaxError):
    pass


class NotTwoRaters(KappaxError):
    pass


class OutOfRange(KappaxError):
    pass


class NoValidPairs(KappaxError):
    pass


class TooFewReplicates(KappaxError):
    pass


class AllReplicatesDegenerate(KappaxError):
    pass
