#pragma once

#include "vtol/liegroup.hpp"
#include "vtol/measurement.hpp"

namespace vtol {

struct ObserverGains {
  double gamma_o = 0.7;
  double k_o1 = 11.0;
  double k_o2 = 10.0;
  double k_o3 = 4.0;

  /// Throws PreconditionError unless every gain is strictly positive.
  void validate() const;
};

/// Estimates (R_hat, P_hat, V_hat) packed in X_hat plus the gyro-bias estimate.
struct EstimatorState {
  NavState nav;
  Vec3 gyro_bias = Vec3::Zero();
};

/// Entries of W = u([w_omega]x, w_v, w_a, 1).
struct CorrectionFactors {
  Vec3 w_omega = Vec3::Zero();
  Vec3 w_v = Vec3::Zero();
  Vec3 w_a = Vec3::Zero();

  TangentInput tangent() const { return {w_omega, w_v, w_a, 1.0}; }
};

/// Continuous-time estimator right-hand side.
struct ObserverDerivatives {
  Mat3 attitude_rate = Mat3::Zero();  ///< d R_hat / dt
  Vec3 bias_rate = Vec3::Zero();
  Vec3 position_rate = Vec3::Zero();
  Vec3 velocity_rate = Vec3::Zero();
};

/// w_omega = k_o1 ups_o
/// w_v     = k_o2 sum y~ - (1/s_T) [w_omega]x (sum y~ + s_T p_c)
/// w_a     = -g e3 + k_o3 sum y~
CorrectionFactors correction_factors(const Innovations& inn, const FeatureSet& fs,
                                     const ObserverGains& gains, double g);

/// Predictor input U_hat = u([Omega_m - b_hat]x, 0, -(thrust/m) e3, 1).
TangentInput observer_input(const Vec3& omega_m, const Vec3& gyro_bias, double thrust, double m);

ObserverDerivatives observer_derivatives(const EstimatorState& est, const Vec3& omega_m,
                                         double thrust, double m, const CorrectionFactors& w,
                                         const Innovations& inn, const ObserverGains& gains);

/// X_hat exp(U_hat dt). The result generally leaves SE_2(3) (entry (5,4) = dt)
/// and is therefore returned as a raw matrix.
Mat5 observer_predict(const EstimatorState& est, const Vec3& omega_m, double thrust, double m,
                      double dt);

/// exp(-W dt) X_pred, validated and re-projected onto SE_2(3).
NavState observer_correct(const Mat5& predicted, const CorrectionFactors& w, double dt);

/// b_hat + dt gamma_o R_hat ups_o.
Vec3 bias_update(const Vec3& gyro_bias, const Rotation& r_hat, const Vec3& ups_o,
                 const ObserverGains& gains, double dt);

struct ObserverStep {
  EstimatorState state;
  Innovations innovations;
  CorrectionFactors corrections;
};

/// One discrete predict / correct / bias-update cycle. Innovations and
/// correction factors are formed from the incoming estimate; the bias update
/// uses the corrected attitude.
ObserverStep observer_step_discrete(const EstimatorState& est, const BodyMeasurements& meas,
                                    const FeatureSet& fs, double thrust, double m, double g,
                                    const ObserverGains& gains, double dt);

struct EstimationErrors {
  double attitude = 0.0;  ///< ||R~_o||_I with R~_o = R_hat^T R
  Vec3 bias = Vec3::Zero();      ///< b - b_hat
  Vec3 position = Vec3::Zero();  ///< P_hat - R~_o P
  Vec3 velocity = Vec3::Zero();  ///< V_hat - R~_o V
  Rotation attitude_error;       ///< R~_o
};

EstimationErrors estimation_errors(const EstimatorState& est, const NavState& truth,
                                   const Vec3& b_true);

/// C_o = (1/2) Tr{(I - R~_o) M} + (1/(2 gamma_o)) |b~|^2
double observer_lyapunov(const Rotation& attitude_error, const Vec3& bias_error,
                         const FeatureSet& fs, const ObserverGains& gains);

}  // namespace vtol
