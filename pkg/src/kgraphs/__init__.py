"""Finite higher-rank graphs: combinatorics, spectral data, Parry measure
and window-scale shift dynamics."""

from .core import (
    ColoredEdge,
    Morphism,
    Skeleton,
    SquareRule,
    ValidationReport,
    Violation,
    combine,
    compose,
    count_morphisms,
    diagonal_restriction,
    enumerate_morphisms,
    factorize,
    identity,
    make_morphism,
    opposite_graph,
    opposite_morphism,
    sample_morphism,
    subblock,
    validate_skeleton,
)
from .dynamics import (
    DistanceResult,
    LocalProduct,
    MetricParams,
    MixingLag,
    Window,
    all_windows,
    bracket,
    distance,
    local_product_enum,
    make_window,
    mixing_lag,
    restrict,
    sample_window,
    sample_window_parry,
    shift,
    window_from_record,
)
from .measure import (
    CylinderSet,
    DiagonalFunction,
    MeasureValue,
    base_measure,
    beta_transport,
    conditional_measure,
    fiber_measure,
    haar_weight,
    parry_measure,
    trace_eval,
    vertex_cylinder,
)
from .relations import (
    GroupoidElement,
    RelationQuery,
    asymptotic_equiv,
    restriction_map,
    semidirect_compose,
    stable_equiv,
    unstable_equiv,
    window_op,
)
from .spectral import (
    AFData,
    AperiodicWitness,
    ConnectivityClass,
    GlobalPeriod,
    InconclusiveProbe,
    PerronData,
    VertexMatrix,
    af_multiplicities,
    aperiodicity_probe,
    classify_connectivity,
    perron_data,
    vertex_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
