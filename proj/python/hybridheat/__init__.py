"""Two heat-conducting rods coupled through a point mass: spectra and boundary null control."""

from ._core import (
    __version__,
    CertificationError,
    Coefficients,
    ConditioningError,
    Config,
    HybridHeatError,
    NumericalError,
    ValidationError,
    auxiliary_spectra,
    characteristic_F,
    characteristic_F_derivative,
    eigenpairs,
    eigenvalues,
    gram_matrix,
    load_config,
    parse_config,
    perturbed_corpus,
    simulate_free,
    spectral_report,
    synthesize_control,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
