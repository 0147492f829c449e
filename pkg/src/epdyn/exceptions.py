"""Exception hierarchy for epdyn."""


class EpdynError(Exception):
    """Base class for all epdyn errors."""


class LinalgError(EpdynError):
    """Dense linear algebra failure (non-square input, convergence, overflow)."""


class ConvergenceError(LinalgError):
    """Iterative decomposition failed to converge; carries per-mode residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class OverflowLinalgError(LinalgError):
    """Matrix function produced non-finite entries."""


class ChainInconsistent(EpdynError):
    """Jordan-chain residual exceeds tolerance: the cluster is not truly
    defective at the working tolerance."""


class ZeroBiorthogonalNorm(EpdynError):
    """Biorthogonal norm |C| below threshold: likely a higher-order or
    misdetected structure."""


class ClosureFailure(EpdynError):
    """Constructed basis does not resolve the identity within tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AmbiguousPairing(EpdynError):
    """Two left/right assignments score equally within tolerance."""


class PairingAmbiguity(EpdynError):
    """Left/right spectral matching (Petermann pairing) is not unique."""


class ComplexSpectrum(EpdynError):
    """Operation requires a real spectrum (pseudo-Hermitian regime)."""
