"""Purity, fidelity and quantum Fisher information of lossy optical cat states.

Everything is built on exact coherent-state algebra in log magnitude and
phase, so amplitudes of order 10 (mean photon numbers in the hundreds) cost
the same as small ones.  A truncated Fock-space oracle (catqfi.fock)
cross-checks the engine at small amplitude.
"""

from .coherent import CoherentSuperposition, LogComplex, inner, overlap
from .errors import (CatqfiError, ConfigError, DegenerateCat, DomainError,
                     EmptySupport, IllConditionedGram, NoBracket, TruncationError)
from .loss import (CoherentMixture, CoherentOperator, apply_loss, lossy_even_odd,
                   lossy_family, lossy_hhg, spectral_decompose, state_to_operator,
                   zeta)
from .metrics import (SensitivityReport, family_fidelity, family_purity,
                      fidelity_pure_mixed, loss_sensitivity, purity,
                      purity_operator)
from .qfi import (QfiInput, TwoModeSuperposition, attach_lo, chi_derivative,
                  delta_qfi, pure_qfi, qfi_mixed, qfi_pure, qfi_ratio, tensor_lo)
from .states import (FAMILIES, CatParams, build_cat, even_odd_cat, hhg_cat,
                     match_amplitude_for_photon_number, mean_photon)

__version__ = "0.1.0"

__all__ = [
    "CatParams", "CatqfiError", "CoherentMixture", "CoherentOperator",
    "CoherentSuperposition", "ConfigError", "DegenerateCat", "DomainError",
    "EmptySupport", "FAMILIES", "IllConditionedGram", "LogComplex", "NoBracket",
    "QfiInput", "SensitivityReport", "TruncationError", "TwoModeSuperposition",
    "apply_loss", "attach_lo", "build_cat", "chi_derivative", "delta_qfi",
    "even_odd_cat", "family_fidelity", "family_purity", "fidelity_pure_mixed",
    "hhg_cat", "inner", "loss_sensitivity", "lossy_even_odd", "lossy_family",
    "lossy_hhg", "match_amplitude_for_photon_number", "mean_photon", "overlap",
    "pure_qfi", "purity", "purity_operator", "qfi_mixed", "qfi_pure",
    "qfi_ratio", "spectral_decompose", "state_to_operator", "tensor_lo", "zeta",
]
