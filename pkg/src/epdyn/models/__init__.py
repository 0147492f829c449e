"""Built-in lattice models hosting exceptional points."""

from .diamond import (
    DiamondEpBasis,
    DiamondRingParams,
    build_diamond,
    diamond_analytic_basis,
    diamond_eigenenergies,
    diamond_pt_operator,
)
from .stub import (
    StubEpBasis,
    StubRibbonParams,
    build_stub,
    site_index,
    site_labels,
    stub_dispersion,
    stub_ep_basis,
    stub_eta,
    stub_flat_band_states,
    stub_gamma,
    stub_hermitian_counterpart,
)

__all__ = [
    "DiamondEpBasis",
    "DiamondRingParams",
    "build_diamond",
    "diamond_analytic_basis",
    "diamond_eigenenergies",
    "diamond_pt_operator",
    "StubEpBasis",
    "StubRibbonParams",
    "build_stub",
    "site_index",
    "site_labels",
    "stub_dispersion",
    "stub_ep_basis",
    "stub_eta",
    "stub_flat_band_states",
    "stub_gamma",
    "stub_hermitian_counterpart",
]
