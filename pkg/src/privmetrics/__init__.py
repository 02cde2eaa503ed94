"""Privacy-metric toolbox.

A shared data model (distributions, joints, finite mechanisms, tables,
traces, regions), implementations of widely used privacy metrics across all
eight output categories, a machine-readable catalog of metric metadata, and
an advisor that filters the catalog through the eight selection questions.
"""

from .core import (
    DataTable,
    DiscreteDistribution,
    EquivalenceClass,
    FiniteMechanism,
    JointDistribution,
    MetricValue,
    Region,
    Trace,
    equivalence_classes,
    parse_distribution,
    parse_joint,
    parse_mechanism,
    parse_table,
    parse_trace,
)
from .errors import (
    ConvergenceError,
    DegenerateError,
    DistributionError,
    DomainError,
    EmptyError,
    MetricError,
    ParamError,
    SchemaError,
    ShapeError,
    UnknownMetricError,
)
from .registry import (
    AdvisorAnswers,
    MetricDescriptor,
    Recommendation,
    export_registry,
    filter_metrics,
    lookup,
)
from .compute import compute as compute_metric

__version__ = "0.1.0"
