"""Computational engine for T-duality of principal torus bundles with flux.

Layers, bottom up:

* ``scalar``     exact symbolic coefficients with sampled numeric equality
* ``exterior``   graded forms over a tagged coframe; Clifford action, pairing
  of spinors, exponentials, fiber integration
* ``bundle``     charts with structure equations, flux splitting, dual charts
* ``courant``    sections of T+T*, the twisted bracket, B-field transforms
* ``structures`` pure spinors, generalized complex structures and metrics,
  pointwise linear algebra
* ``duality``    the form and section transforms, metric transport, the
  closed-form dual metric rules, type change, tangent-structure transport
* ``reduction``  pointwise quotients and the product-space duality criteria
* ``scenarios``  end-to-end reproductions of the worked examples (CLI-driven)
"""

from .scalar import (CScalar, Domain, Scalar, diff, equal_numeric, evaluate,
                     rat, var)
from .exterior import (Coframe, Form, FrameVector, clifford_act, contract,
                       exp_form, fiber_integrate, mukai_pairing, reversal,
                       wedge)
from .bundle import (BundleChart, CorrespondenceChart, build_dual_chart,
                     exterior_derivative, split_flux, twisted_derivative,
                     validate_chart, validate_pair)
from .courant import (Section, b_transform, bracket_spinor_residual,
                      check_lift_splitting, courant_bracket, pairing)
from .structures import (GeneralizedMetric, PureSpinor, SymTensor,
                         annihilator_at, check_integrable, gb_from_cplus,
                         gcs_matrix_at, metric_matrix_at, spinor_type_at,
                         uk_spaces_at)
from .duality import (DualityPair, buscher_rules, dual_type_at, dualize_form,
                      dualize_section, transport_metric, transport_spinor,
                      uk_transport_residual)
from .reduction import (LiftedActionPoint, double_quotient_report,
                        fourier_mukai_check, reduce_pointwise,
                        transversality_check)
from .scenarios import SCENARIOS, run_scenario

__version__ = "0.1.0"
