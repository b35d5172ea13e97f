#include "platdiff/core_model.hpp"

namespace platdiff::model {

double market_potential(double M0, double kappa, double A) {
  const double M = M0 + kappa * A;
  if (!(M > 0.0))
    throw NonPositivePotential("market potential M_t <= 0 (M0=" + std::to_string(M0) +
                               ", kappa=" + std::to_string(kappa) +
                               ", A=" + std::to_string(A) + ")");
  return M;
}

double platform_external_force(const PlatformParams& params, const PlatformFrame& frame) {
  if (params.beta.size() != frame.X.size() || params.rho.size() != frame.Z.size())
    throw DimensionMismatch("platform_external_force: covariate dimensions disagree");
  return params.p0 + frame.X.dot(params.beta) + frame.Z.dot(params.rho);
}

std::pair<double, double> complement_forces(const ComplementParams& params,
                                            const ComplementFrame& frame) {
  const double p = params.p0 + params.p1 * frame.pv + params.p2 * frame.av +
                   params.p_int * frame.pv * frame.av;
  const double q = params.q0 + params.q1 * frame.rtv + params.q2 * frame.ol +
                   params.q3 * frame.stavg + params.q_int_rtv_ol * frame.rtv * frame.ol +
                   params.q_int_rtv_stavg * frame.rtv * frame.stavg;
  return {p, q};
}

double platform_drift(double m_prev, double p, double q, double M) {
  if (!(M > 0.0)) throw NonPositivePotential("platform_drift: M_t must be > 0");
  return (p + q * m_prev / M) * (M - m_prev);
}

double complement_drift(double n_prev, double m_prev, double p, double q, double alpha,
                        double delta) {
  const double pot = alpha * m_prev;
  if (!(pot > kPotentialFloor))
    throw DegeneratePotential("complement_drift: alpha*m_prev at or below floor");
  return (p + q * (1.0 - delta) * n_prev / pot) * (pot - n_prev) - delta * n_prev;
}

double platform_jacobian(double m_prev, double p, double q, double M) {
  if (!(M > 0.0)) throw NonPositivePotential("platform_jacobian: M_t must be > 0");
  return 1.0 + q - p - 2.0 * q * m_prev / M;
}

double complement_jacobian(double n_prev, double m_prev, double p, double q, double alpha,
                           double delta) {
  const double pot = alpha * m_prev;
  if (!(pot > kPotentialFloor))
    throw DegeneratePotential("complement_jacobian: alpha*m_prev at or below floor");
  const double qd = q * (1.0 - delta);
  return 1.0 + qd - p - delta - 2.0 * qd * n_prev / pot;
}

}  // namespace platdiff::model

namespace platdiff {

Eigen::VectorXd theta_vector(const ComplementParams& c) {
  Eigen::VectorXd v(kThetaDim);
  v << c.alpha, c.delta, c.p0, c.p1, c.p2, c.q0, c.q1, c.q2, c.q3;
  return v;
}

void apply_theta(ComplementParams& c, const Eigen::VectorXd& theta) {
  if (theta.size() != kThetaDim)
    throw DimensionMismatch("apply_theta: expected a 9-vector");
  c.alpha = theta[0];
  c.delta = theta[1];
  c.p0 = theta[2];
  c.p1 = theta[3];
  c.p2 = theta[4];
  c.q0 = theta[5];
  c.q1 = theta[6];
  c.q2 = theta[7];
  c.q3 = theta[8];
}

}  // namespace platdiff
