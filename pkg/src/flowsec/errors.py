"""Exception types raised across the package.

Everything derives from FlowsecError so callers (and the CLI) can catch
analysis errors without swallowing programming errors.
"""


class FlowsecError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateEntityError(FlowsecError):
    """A name was declared more than once where uniqueness is required."""


class UnknownEndpointError(FlowsecError):
    """A channel references a name that was never declared."""


class UnknownEntityError(FlowsecError):
    """A query names an entity that does not exist."""


class NotAPreorderError(FlowsecError):
    """A relation handed in as a flow relation is not reflexive-transitive."""


class MissingLabelError(FlowsecError):
    """An entity that should carry a label has none."""


class EntityMismatchError(FlowsecError):
    """Two structures that must share an entity set do not."""


class UnknownLevelError(FlowsecError):
    """A security level is not a member of the level poset in use."""


class UnknownCategoryError(FlowsecError):
    """A category is not in the declared category universe."""


class UnknownFlowTypeError(FlowsecError):
    """A flow type was used without being declared."""


class PartNameClashError(FlowsecError):
    """A part name is not fresh: it collides with an entity or another part."""


class CycleError(FlowsecError):
    """A declared partial order contains a cycle (antisymmetry violated)."""


class ParseError(FlowsecError):
    """A document could not be parsed; carries the offending position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DocumentSyntaxError(ParseError):
    """The text does not match the document grammar."""


class DocumentSemanticError(ParseError):
    """The text is grammatical but names or declarations are inconsistent."""
