#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multiwell/instanton.hpp"

namespace multiwell {

/// Two SHO levels coupled by tunnelling. `degeneracy` g counts the equivalent
/// wells on the final side; they enter through the symmetric combination, so
/// the effective coupling is sqrt(g) hbar K.
struct TwoLevelSystem {
  double e_i = 0.0, e_f = 0.0;
  double hbar = 1.0;
  double big_k = 0.0;
  int degeneracy = 1;
  double e_split = 0.0;              ///< e_f - e_i
  std::optional<double> small_k;     ///< sqrt(g) hbar K / |e_split|, absent when e_split == 0
  double e_plus = 0.0, e_minus = 0.0;
  double delta_e = 0.0;              ///< level shift E_+ - max(e_i, e_f)

  /// sqrt(g) hbar K
  double coupling() const;
};

TwoLevelSystem two_level_energies(double e_i, double e_f, double hbar, double big_k,
                                  int degeneracy = 1);

struct KayFactor {
  double value = 0.0;          ///< from K0
  double via_amplitudes = 0.0; ///< from A_i A_f
  double via_positions = 0.0;  ///< from C_i C_f
  double prefactor = 0.0;      ///< ((sqrt(w_f/w_i) + sqrt(w_i/w_f)) / 2)^{-1/2}
  double action_over_hbar = 0.0;
  bool dilute_gas_marginal = false;  ///< S/hbar < 5
};

/// Tunnelling rate K in its three equivalent forms. Throws Inconsistent when
/// they disagree by more than rel_tol.
KayFactor kay_factor(const InstantonSolution& sol, double k0, double hbar, double rel_tol = 1e-8);

/// <f|exp(-tau H / hbar)|i>, all instanton numbers resummed.
double overlap_odd(const TwoLevelSystem& sys, double tau);
/// <i|exp(-tau H / hbar)|i>.
double overlap_even(const TwoLevelSystem& sys, double tau);

/// int_0^inf (dtau / hbar) e^{E tau / hbar} overlap(tau) in closed form, E below the spectrum.
double resolvent_odd(const TwoLevelSystem& sys, double energy);
double resolvent_even(const TwoLevelSystem& sys, double energy);

/// Single-integral form of the (2n+1)-instanton term of overlap_odd.
double simplex_term_odd(int n, const TwoLevelSystem& sys, double tau);
/// The 2n-instanton term of overlap_even (n = 0 is the bare well).
double simplex_term_even(int n, const TwoLevelSystem& sys, double tau);

struct WavefunctionValue {
  std::string level;  ///< "lower", "upper" or "parity"
  double energy = 0.0;
  double position = 0.0;
  double value = 0.0;  ///< |psi(position)|
};

/// Endpoint amplitudes |psi(X_well)| of the two-level eigenstates times the
/// SHO peak factor (omega / pi hbar)^{1/4}. `finals` holds the g equivalent wells;
/// with g = 2 the antisymmetric, coupling-free level is listed as "parity".
std::vector<WavefunctionValue> wavefunction_amplitudes(const TwoLevelSystem& sys, const Well& initial,
                                                       std::span<const Well> finals);

}  // namespace multiwell
