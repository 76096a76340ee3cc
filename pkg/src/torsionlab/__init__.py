"""torsionlab: twisted graph Laplacians on square-tiled surfaces.

Builds discretizations of square-tiled flat surfaces carrying flat unitary
bundles, computes twisted determinants and their renormalized limits, and
verifies at desk scale the identities tying spanning trees, cycle-rooted
spanning forests, discrete spectra and zeta-regularized determinants.
"""

__version__ = "0.1.0"

import os as _os

# honor TORSIONLAB_THREADS before numpy binds its thread pools
_threads = _os.environ.get("TORSIONLAB_THREADS", "")
if _threads.isdigit() and int(_threads) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from . import errors
from .surfaces import (SquareTiledSurface, GeometrySummary, build_surface,
                       geometry_summary, rescale, rectangle, torus, cylinder,
                       lshape, slit, cone_model, angle_model, standard_cuts,
                       gauss_bonnet_defect)
from .meshes import MeshGraph, discretize, cone_neighbors
from .bundles import (HolonomyRepresentation, UnitaryConnection,
                      trivial_connection, connection_from_holonomy,
                      gauge_transform, cycle_monodromy, flat_check,
                      flat_sections_dim, random_su2, random_unitary,
                      random_flat_representation, generator_loop)
from .laplacian import (HermitianSpectrum, assemble, spectrum, log_det_prime,
                        discrete_zeta)
from .forests import (CRSF, count_spanning_trees, enumerate_crsfs,
                      crsf_weighted_sum, noncontractible_expectation)
from .meshspectra import (CATALAN, Constants, FourierProfile, catalan_constant,
                          mesh_eigenvalue, mesh_eigenvector,
                          mesh_eigenvector_norm_sq, mesh_eigenvalue_grid,
                          rectangle_mesh_spectrum, torus_mesh_spectrum,
                          cylinder_mesh_spectrum, closed_form_log_det,
                          sin_product, sin_product_direct,
                          sin_product_uncorrected, szego_trace_direct,
                          szego_trace_contraction, szego_expansion_predicted)
from .torsion import (ContinuumSpectrum, continuum_spectrum, heat_trace,
                      heat_trace_expansion,
                      zeta_zero, zeta_zero_from_heat_trace, dedekind_eta,
                      torus_torsion, rectangle_torsion, cylinder_torsion,
                      rescale_torsion)
from .experiments import (FlatSetup, RenormSeries, BumpProfile,
                          renormalized_logdet, convergence_study,
                          dense_renorm_series, model_correction_series,
                          ratio_study, uniform_weyl_check, weyl_slope,
                          build_bump, embedding_check, richardson_extrapolate)
