"""Boundary regularity analysis: supporting-ball radius and normal Lipschitz constant."""

from ._validation import (
    CertificateInfeasibleError,
    CylinderTooLargeError,
    InvalidInputError,
    SamplingError,
)
from .certificates import GraphCertificate, cross_check_with_estimator, delta0_certificate, envelope_check
from .estimators import (
    NormalLipschitzEstimator,
    RegularityAnalyzer,
    RegularityReport,
    SupportRadiusEstimator,
    build_certificate,
    equivalence_report,
    pair_lipschitz_margin,
)
from .fourball import FourBallConfig, check_euclidean, check_lp, run_trials
from .geometry import EUCLIDEAN, Ball, NormContext, RigidFrame, frame_to_north, lp, norm
from .lp_inequalities import holder_bound

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "CertificateInfeasibleError",
    "CylinderTooLargeError",
    "EUCLIDEAN",
    "FourBallConfig",
    "GraphCertificate",
    "InvalidInputError",
    "NormContext",
    "NormalLipschitzEstimator",
    "RegularityAnalyzer",
    "RegularityReport",
    "RigidFrame",
    "SamplingError",
    "SupportRadiusEstimator",
    "build_certificate",
    "check_euclidean",
    "check_lp",
    "cross_check_with_estimator",
    "delta0_certificate",
    "envelope_check",
    "equivalence_report",
    "frame_to_north",
    "holder_bound",
    "pair_lipschitz_margin",
    "lp",
    "norm",
    "run_trials",
]
