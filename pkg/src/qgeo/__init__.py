"""Riemannian geometry of the qubit depolarizing channel."""

from .channel import contraction_factor, depolarize, depolarize_bell, depolarize_bloch
from .errors import QGeoError
from .geodesic import (
    FourBlochVector,
    GeodesicFrame,
    deform_point,
    frame_from_seed,
    geodesic_point,
    lift,
    project,
    sample_geodesic,
)
from .hilbert import (
    BlochVector,
    DensityOperator,
    HermitianOperator,
    bell_state,
    bloch_from_density,
    density_from_bloch,
    eigendecompose,
    pauli_basis,
)
from .metric import (
    BuresPoint,
    PureStateChart,
    TangentOperator,
    bures_distance,
    bures_line_element,
    fubini_study_overlap,
    fubini_study_quadratic,
    line_element_bloch,
    line_element_depolarized,
    line_element_operator,
    lowering,
    pure_state_line_element,
    raising,
)
from .verify import SampleConfig, VerificationReport, run_all

__version__ = "0.1.0"
