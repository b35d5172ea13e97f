#ifndef PLATDIFF_CORE_MODEL_HPP
#define PLATDIFF_CORE_MODEL_HPP

#include "platdiff/types.hpp"

namespace platdiff::model {

// Time-varying market potential M_t = M0 + kappa * A_t. Throws
// NonPositivePotential when the result is not strictly positive.
double market_potential(double M0, double kappa, double A);

// External force p_t = p0 + X.beta + Z.rho.
double platform_external_force(const PlatformParams& params, const PlatformFrame& frame);

// Complement forces (p_jt, q_jt) from the release and quality signals.
std::pair<double, double> complement_forces(const ComplementParams& params,
                                            const ComplementFrame& frame);

// One-day adoption increment of the platform given the previous state.
double platform_drift(double m_prev, double p, double q, double M);

// State mean g(m_prev) = m_prev + platform_drift(...).
inline double platform_step(double m_prev, double p, double q, double M) {
  return m_prev + platform_drift(m_prev, p, q, M);
}

// One-day adoption increment of a complement, net of churn.
double complement_drift(double n_prev, double m_prev, double p, double q, double alpha,
                        double delta);

inline double complement_step(double n_prev, double m_prev, double p, double q,
                              double alpha, double delta) {
  return n_prev + complement_drift(n_prev, m_prev, p, q, alpha, delta);
}

// d(m_prev + platform_drift)/d m_prev.
double platform_jacobian(double m_prev, double p, double q, double M);

// d(n_prev + complement_drift)/d n_prev.
double complement_jacobian(double n_prev, double m_prev, double p, double q, double alpha,
                           double delta);

}  // namespace platdiff::model

#endif  // PLATDIFF_CORE_MODEL_HPP
