"""Numerical workbench for holomorphic self-maps of the unit disc.

Submodules:

* `disc` -- geometry: angles in turns, arcs, boxes, exact kernel integrals;
* `measures` -- positive boundary measures and their box statistics;
* `maps` -- self-maps, hyperbolic derivatives, certified suprema;
* `clark` -- spectral measures of inner functions;
* `theorems` -- boundary mixing, set-level box tests, zeros criteria;
* `dimension` -- Hausdorff content, Frostman certificates, Cantor scaffolds;
* `formats` -- JSON/CSV interchange for maps, measures and reports;
* `cli` -- command-line entry points.
"""

from .disc import (
    Arc,
    CarlesonBox,
    DomainError,
    DyadicArc,
    disc_automorphism,
    geodesic_distance,
    hyperbolic_distance,
    poisson_kernel,
    pseudo_hyperbolic,
    unit,
)
from .measures import (
    BoundaryMeasure,
    CompressionReport,
    DyadicMassTree,
    QuadSpec,
    TrigDensity,
    ZerosMeasure,
    b2_characteristic,
    b2_table,
    bernoulli_alternating_measure,
    bounded_compression_test,
    condition_b_constant,
    condition_b_table,
    dirac,
    doubling_constant,
    lebesgue,
    poisson_integral,
    symmetry_defect,
    weighted_gradient,
)
from .maps import (
    Blaschke,
    Compose,
    HerglotzMap,
    HyperbolicGridSpec,
    Outer,
    Product,
    ScaledRotation,
    SelfMap,
    SingularInnerAtoms,
    SupEstimate,
    hyperbolic_derivative,
    map_from_clark_measure,
    sup_hyperbolic_derivative,
)
from .clark import (
    ClarkRadial,
    ClarkSpectrum,
    clark_blaschke,
    clark_radial,
    disintegration_check,
)
from .theorems import (
    B2SetReport,
    InscribedRadius,
    Lemma3Report,
    MeasurableSet,
    MixingReport,
    Theorem2Scan,
    TheoremReport,
    b2_set_test,
    boundary_preimage,
    essential_norm_estimate,
    harmonic_measure,
    inscribed_hyperbolic_radius,
    lemma3_checks,
    mixing_report,
    theorem1_report,
    theorem2_scan,
    zeros_measure,
)
from .dimension import (
    ArcCollection,
    CantorReport,
    FnSelection,
    FpMonotonicity,
    FrostmanCertificate,
    HungerfordBound,
    cantor_builder,
    fn_subcollection,
    fp_monotonicity_check,
    frostman_certificate,
    hausdorff_content,
    hungerford_bound,
    quarter_cantor_generations,
    radial_traces,
)

__all__ = [
    "Arc",
    "CarlesonBox",
    "DomainError",
    "DyadicArc",
    "disc_automorphism",
    "geodesic_distance",
    "hyperbolic_distance",
    "poisson_kernel",
    "pseudo_hyperbolic",
    "unit",
    "BoundaryMeasure",
    "CompressionReport",
    "DyadicMassTree",
    "QuadSpec",
    "TrigDensity",
    "ZerosMeasure",
    "b2_characteristic",
    "b2_table",
    "bernoulli_alternating_measure",
    "bounded_compression_test",
    "condition_b_constant",
    "condition_b_table",
    "dirac",
    "doubling_constant",
    "lebesgue",
    "poisson_integral",
    "symmetry_defect",
    "weighted_gradient",
    "Blaschke",
    "Compose",
    "HerglotzMap",
    "HyperbolicGridSpec",
    "Outer",
    "Product",
    "ScaledRotation",
    "SelfMap",
    "SingularInnerAtoms",
    "SupEstimate",
    "hyperbolic_derivative",
    "map_from_clark_measure",
    "sup_hyperbolic_derivative",
    "ClarkRadial",
    "ClarkSpectrum",
    "clark_blaschke",
    "clark_radial",
    "disintegration_check",
    "B2SetReport",
    "InscribedRadius",
    "Lemma3Report",
    "MeasurableSet",
    "MixingReport",
    "Theorem2Scan",
    "TheoremReport",
    "b2_set_test",
    "boundary_preimage",
    "essential_norm_estimate",
    "harmonic_measure",
    "inscribed_hyperbolic_radius",
    "lemma3_checks",
    "mixing_report",
    "theorem1_report",
    "theorem2_scan",
    "zeros_measure",
    "ArcCollection",
    "CantorReport",
    "FnSelection",
    "FpMonotonicity",
    "FrostmanCertificate",
    "HungerfordBound",
    "cantor_builder",
    "fn_subcollection",
    "fp_monotonicity_check",
    "frostman_certificate",
    "hausdorff_content",
    "hungerford_bound",
    "quarter_cantor_generations",
    "radial_traces",
]

__version__ = "0.1.0"
