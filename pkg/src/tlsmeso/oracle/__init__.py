"""Independent validation engines and the enumerable check registry."""

from .bloch import (
    BlochParams,
    BlochResult,
    bloch_steady_state,
    drive_for_saturation,
    gamma_res_ode,
    gamma_res_profile,
    integrate_bloch,
    mc_average,
    qrt_fft_check,
    rabi_assessment,
    relaxation_gamma_rel,
    relaxation_kernel,
    relaxation_kernel_ode,
    steady_state_gamma_res,
    thermal_defect_count,
)
from .registry import ORACLE_REGISTRY, CheckResult, run_registry

__all__ = [
    "BlochParams",
    "BlochResult",
    "ORACLE_REGISTRY",
    "CheckResult",
    "bloch_steady_state",
    "drive_for_saturation",
    "gamma_res_ode",
    "gamma_res_profile",
    "integrate_bloch",
    "mc_average",
    "qrt_fft_check",
    "rabi_assessment",
    "relaxation_gamma_rel",
    "relaxation_kernel",
    "relaxation_kernel_ode",
    "run_registry",
    "steady_state_gamma_res",
    "thermal_defect_count",
]
