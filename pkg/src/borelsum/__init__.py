"""Borel-Laplace resummation along bent contours in the Borel plane."""

__version__ = "0.1.0"

from .borel_functions import (
    BorelFunction,
    BranchCut,
    Composite,
    ConformalSeries,
    Rational,
    SingularTerm,
    TruncatedSeries,
    function_from_dict,
)
from .conformal_map import (
    ConformalMap,
    ConvergenceTable,
    convergence_compare,
    evaluate_conformal,
    map_u,
    map_w,
    recompose,
)
from .contour_geometry import Contour, ContourValidation, Sector, derivative, point, sector_lambda, sector_z, validate
from .errors import (
    BorelError,
    BranchError,
    DivergenceError,
    GeometryError,
    InsufficientSignalError,
    LandauPoleError,
    ParameterError,
    RangeError,
    ValidationError,
)
from .laplace_engine import (
    AmbiguityFit,
    AsymptoticReport,
    BoundReport,
    QuadratureResult,
    ambiguity_scan,
    bound_check,
    check_asymptoticity,
    expansion_partial_sum,
    expansion_terms,
    laplace_derivatives,
    laplace_integral,
    resum,
)
from .qcd_adler import (
    CouplingModel,
    ProbeReport,
    RenormalonModel,
    adler_asymptoticity,
    adler_resum,
    adler_series,
    analyticity_probe,
    arc_path,
    borel_variable,
    prescription_value,
    pv_resum,
    running_coupling,
    segment_path,
    stokes_jump,
)
from .series_core import (
    PowerSeries,
    WatsonParams,
    borel_transform,
    compose_series,
    divide_series,
    evaluate_truncated,
    inverse_borel,
    multiply_series,
    watson_coefficients,
)
