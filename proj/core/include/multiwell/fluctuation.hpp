#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "multiwell/instanton.hpp"

namespace multiwell {

/// A real number carried as sign * exp(log_abs), for quantities that outgrow double range.
struct SignedLog {
  int sign = 1;
  double log_abs = 0.0;

  double value() const;
  static SignedLog from(double x);
};

/// -d^2/dtau^2 + w(tau) on [tau_i, tau_f]. `breaks` lists interior points where
/// w jumps; the integrators restart there instead of stepping across.
struct FluctuationOperator {
  std::function<double(double)> w;
  double tau_i = 0.0, tau_f = 0.0;
  double omega_i = 0.0, omega_f = 0.0;
  std::vector<double> breaks;

  /// Hessian at the instanton, window / min(omega) long and centred on tau1.
  static FluctuationOperator from_instanton(const InstantonSolution& sol, double window);
  static FluctuationOperator constant(double omega, double tau_i, double tau_f);
  /// w = omega_i^2 before tau1 and omega_f^2 after.
  static FluctuationOperator step(double omega_i, double omega_f, double tau1, double tau_i,
                                  double tau_f);
};

struct ReferenceOperator {
  double omega_i = 0.0, omega_f = 0.0;
  double tau1 = 0.0, tau_i = 0.0, tau_f = 0.0;
};

struct ForwardSolve {
  SignedLog psi_f;               ///< psi(tau_f) for psi(tau_i) = 0, psi'(tau_i) = 1
  double wronskian_drift = 0.0;  ///< relative change of the Wronskian of two solutions
};

/// Direct integration of -psi'' + w psi = 0 with periodic rescaling (log accumulator).
/// Throws when psi changes sign inside the window.
ForwardSolve gy_forward_solve(const FluctuationOperator& op, double ode_tol = 1e-12);

/// Closed-form log psi^(0)(tau_f) of the step reference operator.
double reference_log_psi0(const ReferenceOperator& ref);

/// Integrals of the zero mode over the window, carried with a common exponent
/// shift so nothing overflows: f = x0^{-2} e^{-shift}.
struct ZeroModeQuadrature {
  double h = 0.0;
  std::vector<double> tau, log_x0;
  std::vector<double> cumulative, remaining;  ///< int_{tau_i}^s f and int_s^{tau_f} f
  double shift = 0.0;
};

ZeroModeQuadrature zero_mode_quadrature(const InstantonSolution& sol, double tau_i, double tau_f,
                                        double step = 0.0);

/// psi0(tau_f) by reduction of order on the exact zero mode:
/// psi0 = x0(tau_i) x0(tau_f) int x0^{-2}.
SignedLog zero_mode_psi0(const ZeroModeQuadrature& z);

/// Lowest Dirichlet eigenvalue from one Newton step in lambda on the
/// zero-mode solution, exact to first order in lambda0. Returned as a log.
double first_order_log_lambda0(const ZeroModeQuadrature& z);

/// 4 A_i A_f w_i w_f psi0(tau_f) exp(-w_i tau_1i - w_f tau_f1), in log form.
double lambda0_estimate_log(const InstantonSolution& sol, const FluctuationOperator& op,
                            const SignedLog& psi0_f);
double lambda0_estimate(const InstantonSolution& sol, const FluctuationOperator& op,
                        const SignedLog& psi0_f);

double k0_analytic(double amp_i, double amp_f, double omega_i, double omega_f);

/// sqrt(lambda0 psi^(0)(tau_f) / psi0(tau_f)) from logs.
double k0_numeric(double log_lambda0, double log_psi0_ref, const SignedLog& psi0_f);

struct GYOptions {
  double window = 40.0;  ///< window * min(omega)^{-1} is the tau extent
  double ode_tol = 1e-12;
  double step = 0.0;     ///< zero-mode quadrature spacing; 0 picks 0.005 / max(omega)
  /// Also integrate the instanton operator forward when window <= this value.
  double forward_check_window = 20.0;
};

struct GYResult {
  double window = 0.0;
  double tau_i = 0.0, tau_f = 0.0;
  double log_psi0_f = 0.0;
  double log_psi0_ref_f = 0.0;
  double log_psi0_ref_numeric = 0.0;  ///< forward integration of the step operator
  std::optional<double> log_psi0_forward;
  double lambda0 = 0.0;               ///< quotient estimate
  double lambda0_first_order = 0.0;
  double k0_numeric = 0.0;
  double k0_analytic = 0.0;
  double wronskian_drift = 0.0;
};

GYResult gelfand_yaglom(const InstantonSolution& sol, const GYOptions& options = {});

}  // namespace multiwell
