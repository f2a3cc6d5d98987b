"""Nonreciprocal rf-to-optical conversion in a four-mode optoelectromechanical system."""
from .core import (DRIVE_SHIFTED, PAPER_LITERAL, BareParams, DriveConfig, FrameConfig, NonrecipError,
                   susceptibilities)
from .couplings import EffectiveCouplings, effective_couplings_assembled, effective_couplings_closed
from .design import DesignPoint, build_design, from_targets
from .frame import resolve_frame
from .meanfield import HarmonicCatalog, HarmonicKey, perturbative_harmonics
from .rwa_audit import coefficient_catalog, rwa_margin
from .scattering import isolation_solve, smatrix, smatrix_direct

__version__ = "0.1.0"
