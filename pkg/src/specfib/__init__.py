"""Exact-arithmetic toolkit for spectral sheaves on K3-fibered threefolds."""

from .chow import (
    IntersectionRing,
    IntersectionRingSpec,
    ProductRing,
    RingElement,
    fibered_threefold,
    pullback,
    pushforward,
    ring_from_spec,
    tensor_product,
    to_threefold,
)
from .fiber_k3 import (
    AdmissibilityVerdict,
    FiberRestriction,
    FibrationGeometry,
    MukaiVector,
    fine_moduli_check,
    hilbert_polynomial,
    mukai_square,
    restrict_to_fiber,
)
from .spectral import (
    KernelData,
    ReflexiveK3Spec,
    SpectralDatum,
    dual_rank_one_low_degree,
    euler_characteristic,
    grr_transform,
    oracle_spectral_chern,
    ramification,
    spectral_chern_general,
    spectral_chern_rank_one,
    todd_relative,
    trivial_fibration_chern,
    twist,
)
from .stability import (
    StabilityReport,
    discriminant,
    extension_check,
    polarization_threshold,
    relative_degree,
    relative_slope,
    stability_bound,
)
from .search import (
    MukaiHit,
    RankOneHit,
    ScanRequest,
    ScanResult,
    evaluate_mukai_point,
    rank_one_entries,
    scan_mukai,
    scan_rank_one,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
