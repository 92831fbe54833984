"""Exception hierarchy shared by every module.

All errors derive from ``RashomonPrepError`` and, where a builtin fits, from
``ValueError`` too, so callers can catch either.
"""


class RashomonPrepError(Exception):
    """Base class for library errors."""


class NonBinaryTarget(RashomonPrepError, ValueError):
    pass


class EmptyAfterCleaning(RashomonPrepError, ValueError):
    pass


class SingleClass(RashomonPrepError, ValueError):
    pass


class DegenerateClassSize(RashomonPrepError, ValueError):
    pass


class KTooLarge(RashomonPrepError, ValueError):
    pass


class UnknownMethod(RashomonPrepError, ValueError):
    pass


class EmptyDangerSet(RashomonPrepError, ValueError):
    pass


class NoSafeAnchors(RashomonPrepError, ValueError):
    pass


class ConstantFeature(RashomonPrepError, ValueError):
    pass


class EmptyGroup(RashomonPrepError, ValueError):
    pass


class NoFeaturesSelected(RashomonPrepError, ValueError):
    pass


class TooLarge(RashomonPrepError, ValueError):
    pass


class TooFewProfiles(RashomonPrepError, ValueError):
    pass


class SingleClassEval(RashomonPrepError, ValueError):
    pass


class DimensionMismatch(RashomonPrepError, ValueError):
    pass


class TooFewGroups(RashomonPrepError, ValueError):
    pass


class IncompleteBlocks(RashomonPrepError, ValueError):
    pass


class LengthMismatch(RashomonPrepError, ValueError):
    pass


class ConstantInput(RashomonPrepError, ValueError):
    pass


class ConfigInvalid(RashomonPrepError, ValueError):
    pass


class UnknownKey(ConfigInvalid):
    pass


class MissingDataset(ConfigInvalid):
    pass


class EmptyStore(RashomonPrepError, ValueError):
    pass
