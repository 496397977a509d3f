"""q-calculus numerics: q-Pochhammer symbols, Jackson integrals, q-gamma and
q-beta in several representations, and checks of bilateral q-series identities.
"""

__version__ = "0.1.0"

from qcalc.calculus import (IntegralResult, PairedValues, QPolynomial, change_of_variable,
                            jackson_improper, jackson_integral, jackson_interval, jackson_upper,
                            q_derivative, q_integration_by_parts_check, reciprocity_transform)
from qcalc.context import (EXACT_DEFAULT_POLICY, Mode, QContext, TruncationPolicy, make_context,
                           parse_rational, q_factorial, q_number)
from qcalc.errors import (DivergenceWarning, DomainError, InexactWarning, ModeError, NotInvertible,
                          PoleError, QCalcError, SeriesWindowError)
from qcalc.fps import (Monomial, QLaurentSeries, fps_add, fps_equal, fps_invert, fps_mul,
                       fps_poch_inf, fps_theta_sum, parse_monomial)
from qcalc.identities import (Backend, IdentityId, IdentityReport, bilateral_sum, verify_beta_representations,
                              verify_gamma_representations, verify_jacobi, verify_jacobi_family,
                              verify_ramanujan, verify_symmetric_bilateral, verify_translation_invariance)
from qcalc.pochhammer import (PochResult, poch_finite, poch_identities_check, poch_inf, poch_real,
                               power_over_poch)
from qcalc.special import (BETA_REPRESENTATIONS, GAMMA_REPRESENTATIONS, E_q, E_q_series, GammaBetaValue,
                           KValue, Representation, beta_q, beta_q_gamma_ratio, beta_q_integral,
                           beta_q_symmetric_integral, e_q, e_q_series, gamma_q, gamma_q_bigE_integral,
                           gamma_q_product, jackson_factor, k_function, little_beta, little_gamma)
