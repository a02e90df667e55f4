"""Exception hierarchy for the ipomset package.

Every error raised on purpose by this package derives from IpomsetError,
so callers can catch one type at API boundaries (the CLI does exactly
that).  Validation errors carry enough structure to point at the
offending part of the object.
"""

from __future__ import annotations


class IpomsetError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IpomsetError):
    """An object failed a structural well-formedness check."""


class PrecedenceCyclic(ValidationError):
    """The precedence relation has a cycle."""

    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = cycle
        super().__init__(f"precedence cycle: {' < '.join(cycle)} < {cycle[0]}")


class NotIntervalOrder(ValidationError):
    """Precedence contains a 2+2: w < x and y < z with no cross relation.

    witness is (w, x, y, z).
    """

    def __init__(self, witness: tuple[str, str, str, str]):
        self.witness = witness
        w, x, y, z = witness
        super().__init__(
            f"not an interval order: {w} < {x} and {y} < {z} "
            f"but {w} !< {z} and {y} !< {x}"
        )


class EventOrderIncomplete(ValidationError):
    """Two concurrent events are not ordered by the event order."""

    def __init__(self, pair: tuple[str, str]):
        self.pair = pair
        super().__init__(f"concurrent events not event-ordered: {pair[0]}, {pair[1]}")


class EventOrderCyclic(ValidationError):
    """The event order restricted to some antichain has a cycle."""

    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = cycle
        super().__init__(f"event-order cycle: {' -> '.join(cycle)} -> {cycle[0]}")


class InterfaceNotExtremal(ValidationError):
    """A source event is not minimal, or a target event is not maximal."""

    def __init__(self, event: str, side: str):
        self.event = event
        self.side = side
        which = "minimal" if side == "source" else "maximal"
        super().__init__(f"{side} interface event {event!r} is not {which}")


class InterfaceMismatch(IpomsetError):
    """Gluing failed: target interface of the left operand does not match
    the source interface of the right operand."""


class NotInTargetInterface(IpomsetError):
    """Asked to remove events that are not in the target interface."""


class BoundTooLarge(IpomsetError):
    """An enumeration bound exceeds the configured safety limit."""


class MissingFace(ValidationError):
    """A cell of positive dimension lacks a required face map entry."""

    def __init__(self, cell: str, kind: str, position: int):
        self.cell = cell
        self.kind = kind
        self.position = position
        super().__init__(f"cell {cell!r} missing {kind} face at position {position}")


class FaceTypeMismatch(ValidationError):
    """A face map points at a cell whose event list is not the expected
    restriction of the parent's."""

    def __init__(self, cell: str, kind: str, position: int, face: str):
        self.cell = cell
        self.kind = kind
        self.position = position
        self.face = face
        super().__init__(
            f"face {kind}_{position} of {cell!r} is {face!r}, "
            f"whose events do not match"
        )


class PrecubicalViolation(ValidationError):
    """The face maps fail a commutation identity."""

    def __init__(self, cell: str, detail: str):
        self.cell = cell
        self.detail = detail
        super().__init__(f"face maps of {cell!r} do not commute: {detail}")


class LabelMismatch(IpomsetError):
    """Two objects that must share a label tuple do not."""


class ActionUndefined(IpomsetError):
    """A partial action was applied where it is undefined."""


class SourceNotEmpty(IpomsetError):
    """An operation needs an element over the empty source interface."""


class NotCoherent(IpomsetError):
    """The presentation lacks the face data needed to build an automaton."""


class UnknownName(IpomsetError):
    """Lookup of a named formula or corpus entry failed."""


class FormulaSyntaxError(IpomsetError):
    """The formula text could not be parsed; position is a 0-based offset."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at offset {position})")


class UnknownDocumentKind(IpomsetError):
    """A JSON document has a missing or unrecognized kind field."""


class DocumentError(IpomsetError):
    """A JSON document is structurally invalid for its kind."""


class CorpusMismatch(IpomsetError):
    """A corpus entry's recomputed value differs from its frozen value."""

    def __init__(self, entry: str, detail: str):
        self.entry = entry
        self.detail = detail
        super().__init__(f"corpus entry {entry!r} mismatch: {detail}")
