#pragma once

#include <utility>
#include <vector>

#include "multiwell/numerics.hpp"
#include "multiwell/potential.hpp"

namespace multiwell {

/// Where the collective coordinate tau1 sits along the path.
enum class AnchorConvention {
  EqualAmplitude,  ///< A_i == A_f for the zero-mode tails
  BarrierTop,      ///< X(tau1) at the barrier maximum
};

struct TrajectoryOptions {
  double half_window = 0.0;  ///< samples cover tau1 -+ half_window; 0 picks 24 / min(omega)
  double step = 0.0;         ///< grid spacing; 0 picks 0.005 / max(omega)
  double ode_tol = 1e-13;
  double quad_tol = 1e-12;
  double tau1 = 0.0;
  AnchorConvention anchor = AnchorConvention::EqualAmplitude;
  /// omega |tau - tau1| range used for the asymptotic amplitude fit.
  std::pair<double, double> fit_window{8.0, 16.0};
};

struct Amplitudes {
  double amp_i = 0.0, amp_f = 0.0;  ///< zero-mode tails  x0 ~ A e^{-omega |tau - tau1|}
  double c_i = 0.0, c_f = 0.0;      ///< position tails |X - X_well| ~ C e^{-omega |tau - tau1|}
  double residual = 0.0;            ///< largest RMS residual of the four log-linear fits
};

/// The 1-instanton between two neighbouring same-level wells, sampled on a
/// uniform tau grid. The shape is stored through the log-distance to the
/// nearer well (initial well for tau <= tau1, final well after), which keeps
/// full relative precision in the exponential tails.
class InstantonSolution {
 public:
  InstantonSolution(WellPair pair, LocalExpansion initial, LocalExpansion final, double tau1,
                    double anchor_position, double action, double step, int half_count,
                    std::vector<double> log_gap_left, std::vector<double> log_gap_right);

  const WellPair& pair() const { return pair_; }
  double tau1() const { return tau1_; }
  double anchor_position() const { return anchor_position_; }
  double action() const { return action_; }
  double omega_i() const { return pair_.initial.omega; }
  double omega_f() const { return pair_.final.omega; }
  double step() const { return step_; }

  const std::vector<double>& tau_grid() const { return tau_; }
  const std::vector<double>& x_bar() const { return x_bar_; }
  const std::vector<double>& x_bar_dot() const { return x_bar_dot_; }
  const std::vector<double>& log_x0() const { return log_x0_; }
  /// ln|X - X_near| per sample, with X_near the initial well for tau <= tau1.
  const std::vector<double>& log_gap() const { return log_gap_; }

  const Amplitudes& amplitudes() const { return amplitudes_; }
  void set_amplitudes(const Amplitudes& a) { amplitudes_ = a; }

  /// Interpolated (tails: exact SHO asymptote) evaluation at any tau.
  double x_bar_at(double tau) const;
  double log_x0_at(double tau) const;
  /// d/dtau ln x0 = V'(X) / sqrt(2 V(X)).
  double dlog_x0_at(double tau) const;
  /// V''(X(tau)), the fluctuation potential.
  double fluctuation_potential_at(double tau) const;

  /// Same solution with tau1 (and the whole grid) moved to `tau1`.
  InstantonSolution shifted_to(double tau1) const;

 private:
  struct Side {
    double u;  ///< signed offset from the side's well
    const LocalExpansion* expansion;
  };
  Side side_at(double tau) const;

  WellPair pair_;
  LocalExpansion initial_, final_;
  double tau1_, anchor_position_, action_, step_;
  int half_count_;
  std::vector<double> log_gap_left_, log_gap_right_;  // index k: tau1 -+ k*step
  numerics::UniformHermite left_, right_;
  std::vector<double> tau_, x_bar_, x_bar_dot_, log_x0_, log_gap_;
  Amplitudes amplitudes_;
};

/// S = int sqrt(2V) dX between the two wells, adaptive Gauss-Kronrod.
double action_quadrature(const PotentialModel& model, const WellPair& pair, double quad_tol = 1e-12);

/// Position amplitudes C_i, C_f of the instanton anchored at X(tau1) = anchor,
/// from the convergent integrals ln C = ln|anchor - X_w| + int (omega / sqrt(2V) - 1/|X - X_w|) dX.
std::pair<double, double> position_amplitudes_by_quadrature(const PotentialModel& model,
                                                            const WellPair& pair, double anchor,
                                                            double quad_tol = 1e-12);

/// Anchor position for the requested convention.
double anchor_position(const PotentialModel& model, const WellPair& pair, AnchorConvention anchor,
                       double quad_tol = 1e-12);

/// Integrates dX/dtau = +sqrt(2V(X)) outward from the anchor and fills every
/// field, including fitted amplitudes.
InstantonSolution solve_trajectory(const PotentialModel& model, const WellPair& pair,
                                   const TrajectoryOptions& options = {});

/// Fixed-slope log-linear fit of the tails over omega |tau - tau1| in fit_window.
/// Subleading e^{-k omega |tau - tau1|} corrections (k = 1..3) are fitted along.
Amplitudes extract_amplitudes(const InstantonSolution& sol, std::pair<double, double> fit_window = {8.0, 16.0},
                              double max_residual = 1e-4);

/// x0 = Xdot / sqrt(S) on the solution grid.
std::vector<double> zero_mode(const InstantonSolution& sol);

/// int Xdot^2 dtau over the samples plus the exponential tail beyond them.
double action_from_trajectory(const InstantonSolution& sol);

}  // namespace multiwell
