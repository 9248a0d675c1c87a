"""Data-flow security analysis for arbitrary networks.

Convert freely between four equivalent views of who may send data to whom --
channel relations, the flow preorder, the poset of equivalence classes, and
set labels -- and answer secrecy, integrity, and conflict questions on any of
them. Tuple labels over a level poset translate into plain set labels, and
coexisting typed flows with trusted entities are analyzed separately and
merged.
"""

from .errors import (
    CycleError,
    DocumentSemanticError,
    DocumentSyntaxError,
    DuplicateEntityError,
    EntityMismatchError,
    FlowsecError,
    MissingLabelError,
    NotAPreorderError,
    ParseError,
    PartNameClashError,
    UnknownCategoryError,
    UnknownEndpointError,
    UnknownEntityError,
    UnknownFlowTypeError,
    UnknownLevelError,
)
from .formats import Document, TupleLabeling, emit, format_poset, parse, to_dot
from .labeling import (
    IsomorphismReport,
    LabelAssignment,
    can_flow,
    compute_labels,
    flow_from_labels,
    verify_isomorphism,
)
from .levels import (
    LEVEL_PREFIX,
    LevelPoset,
    SetLabel,
    TupleLabel,
    batch_translate,
    level_poset,
    tuple_label,
    tuple_leq,
    tuple_to_set,
)
from .multiflow import (
    IntraRule,
    MultiflowReport,
    TypedNetwork,
    analyze,
    build_typed_network,
    split_entity,
)
from .network import (
    CondensationPoset,
    FlowRelation,
    Network,
    build_network,
    channels_from_flow,
    condense,
    flow_between,
    poset_from_classes,
    transitive_closure,
    transitive_reduction,
)
from .security import (
    SecurityReport,
    in_conflict,
    is_implementation,
    max_integrity_classes,
    max_secrecy_classes,
    security_report,
)

__version__ = "0.1.0"

__all__ = [
    "CondensationPoset",
    "CycleError",
    "Document",
    "DocumentSemanticError",
    "DocumentSyntaxError",
    "DuplicateEntityError",
    "EntityMismatchError",
    "FlowRelation",
    "FlowsecError",
    "IntraRule",
    "IsomorphismReport",
    "LEVEL_PREFIX",
    "LabelAssignment",
    "LevelPoset",
    "MissingLabelError",
    "MultiflowReport",
    "Network",
    "NotAPreorderError",
    "ParseError",
    "PartNameClashError",
    "SecurityReport",
    "SetLabel",
    "TupleLabel",
    "TupleLabeling",
    "TypedNetwork",
    "UnknownCategoryError",
    "UnknownEndpointError",
    "UnknownEntityError",
    "UnknownFlowTypeError",
    "UnknownLevelError",
    "analyze",
    "batch_translate",
    "build_network",
    "build_typed_network",
    "can_flow",
    "channels_from_flow",
    "compute_labels",
    "condense",
    "emit",
    "flow_between",
    "flow_from_labels",
    "format_poset",
    "in_conflict",
    "is_implementation",
    "level_poset",
    "max_integrity_classes",
    "max_secrecy_classes",
    "parse",
    "poset_from_classes",
    "security_report",
    "split_entity",
    "to_dot",
    "transitive_closure",
    "transitive_reduction",
    "tuple_label",
    "tuple_leq",
    "tuple_to_set",
    "verify_isomorphism",
]
