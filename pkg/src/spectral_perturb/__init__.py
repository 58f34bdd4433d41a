"""Numerical toolkit for eigenspace perturbation bounds in the two-to-infinity norm.

Dense symmetric spectral primitives, noise and instance generators, the
leave-one-out ensemble, per-instance bound certificates, spectral estimators
and seeded Monte Carlo sweeps.
"""

__version__ = "0.1.0"

from .matcore import (
    AlignmentReport,
    InputError,
    SignUndefinedError,
    SpectralDecomposition,
    Subspace,
    align,
    eig_by_magnitude,
    matrix_sign,
    norms,
    principal_angles,
    spectral_norm,
    svd_by_dilation,
    symmetric_dilation,
    two_inf_norm,
)
from .noise import (
    ConfigError,
    InstanceSpec,
    NoiseModel,
    assumption_report,
    completion_instance,
    hellinger_threshold,
    make_ground_truth,
    sample_symmetric_noise,
    sbm_instance,
)
from .loo import (
    Instance,
    LooEnsemble,
    build_ensemble,
    decomposition_identities,
    leave_one_out_noise,
    make_instance,
    proof_quantities,
)
from .certificates import BoundCertificate, Constants, certificates_to_json, lemma_certificates, rank1_chain
from .estimators import agreement, complete_matrix, denoise_symmetric, error_report, first_order_target, sbm_classify
from .experiments import (
    SweepConfig,
    certificate_sweep,
    first_order_sweep,
    mc_entrywise_sweep,
    run_sweep,
    sbm_phase_grid,
    scaling_sweep,
)
