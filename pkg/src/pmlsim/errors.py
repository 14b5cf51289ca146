"""Exception types shared across the package."""


class PmlError(Exception):
    """Base class for all domain errors raised by this package."""


class MalformedXml(PmlError):
    """Input text is not well-formed XML."""


class NotPml(PmlError):
    """Well-formed XML, but not a PML sensor document."""


class MissingRequired(PmlError):
    """A structurally required element is absent."""


class NotALeaf(PmlError):
    """Leaf deletion was requested on a node that has element children."""


class NoSuchNode(PmlError):
    """A node path does not resolve inside the tree."""


class EmptyRow(PmlError):
    """An OR combination was requested over zero candidates."""


class EmptySet(PmlError):
    """A set average was requested over zero rows."""


class TooLarge(PmlError):
    """Exact enumeration would exceed the configured leaf cap."""


class BadSpec(PmlError):
    """A corpus specification has out-of-range or inconsistent fields."""
