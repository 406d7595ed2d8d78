#include "multiwell/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "multiwell/error.hpp"

namespace multiwell {

int SymTridiagonal::count_below(double x) const {
  constexpr double pivmin = 1e-300;
  int count = 0;
  double q = 1.0;
  for (std::size_t j = 0; j < diag.size(); ++j) {
    const double coupling = j == 0 ? 0.0 : off[j - 1] * off[j - 1] / q;
    q = diag[j] - x - coupling;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double SymTridiagonal::eigenvalue(int k) const {
  const std::size_t n = diag.size();
  if (k < 0 || static_cast<std::size_t>(k) >= n) throw Error(ErrorKind::Config, "eigenvalue index out of range");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = (j > 0 ? std::abs(off[j - 1]) : 0.0) + (j + 1 < n ? std::abs(off[j]) : 0.0);
    lo = std::min(lo, diag[j] - r);
    hi = std::max(hi, diag[j] + r);
  }
  lo -= 1e-12 * std::max(std::abs(lo), 1.0);
  hi += 1e-12 * std::max(std::abs(hi), 1.0);
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> SymTridiagonal::eigenvector(double lambda, int iterations) const {
  const std::size_t n = diag.size();
  if (n == 1) return {1.0};
  // LU of (T - lambda) with partial pivoting; c2 is the fill-in from row swaps.
  std::vector<double> a(off), b(n), c(off), c2(n > 2 ? n - 2 : 0, 0.0);
  std::vector<char> swapped(n - 1, 0);
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    b[j] = diag[j] - lambda;
    scale = std::max(scale, std::abs(diag[j]) + (j < n - 1 ? std::abs(off[j]) : 0.0));
  }
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(b[i]) >= std::abs(a[i])) {
      if (b[i] == 0.0) b[i] = tiny;
      const double fact = a[i] / b[i];
      a[i] = fact;
      b[i + 1] -= fact * c[i];
    } else {
      const double fact = b[i] / a[i];
      b[i] = a[i];
      a[i] = fact;
      const double temp = c[i];
      c[i] = b[i + 1];
      b[i + 1] = temp - fact * b[i + 1];
      if (i + 2 < n) {
        c2[i] = c[i + 1];
        c[i + 1] = -fact * c[i + 1];
      }
      swapped[i] = 1;
    }
  }
  if (b[n - 1] == 0.0) b[n - 1] = tiny;

  auto solve = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= a[i] * x[i];
    }
    x[n - 1] /= b[n - 1];
    x[n - 2] = (x[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) x[i] = (x[i] - c[i] * x[i + 1] - c2[i] * x[i + 2]) / b[i];
  };
  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    for (double& v : x) v /= s;
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  };

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  for (int it = 0; it < std::max(iterations, 1); ++it) {
    solve(x);
    normalize(x);
  }
  return x;
}

GridSpec default_grid(std::span<const Well> wells, double hbar, int n_points) {
  if (wells.empty()) throw Error(ErrorKind::Config, "default grid needs at least one well");
  if (!(hbar > 0.0)) throw Error(ErrorKind::Config, "hbar must be positive");
  double lo = wells.front().position, hi = lo, wmin = wells.front().omega;
  for (const Well& w : wells) {
    lo = std::min(lo, w.position);
    hi = std::max(hi, w.position);
    wmin = std::min(wmin, w.omega);
  }
  const double margin = 8.0 * std::sqrt(hbar / wmin);
  return GridSpec{lo - margin, hi + margin, n_points, hbar};
}

namespace {

struct Level {
  double energy = 0.0;
  int parity = 0;
  int index = 0;  ///< position within its sector
  std::vector<double> psi;  ///< all grid nodes, zero at both ends
};

std::vector<Level> sector_levels(const SymTridiagonal& t, int count, int parity) {
  std::vector<Level> out;
  const int n = std::min<int>(count, static_cast<int>(t.diag.size()));
  for (int k = 0; k < n; ++k) {
    const double e = t.eigenvalue(k);
    out.push_back(Level{e, parity, k, t.eigenvector(e)});
  }
  return out;
}

void finish_vector(std::vector<double>& psi, double h) {
  double s = 0.0;
  for (double v : psi) s += v * v;
  s = std::sqrt(s * h);
  std::size_t peak = 0;
  for (std::size_t j = 0; j < psi.size(); ++j)
    if (std::abs(psi[j]) > std::abs(psi[peak]) * (1.0 + 1e-12)) peak = j;
  const double sign = psi[peak] < 0.0 ? -1.0 : 1.0;
  for (double& v : psi) v *= sign / s;
}

std::vector<Level> solve_grid(const std::function<double(double)>& potential, bool parity,
                              const GridSpec& grid, int n_levels, bool truncate = true) {
  const int m = grid.n_points - 2;
  const double h = grid.spacing();
  const double kin = grid.hbar * grid.hbar / (h * h);
  SymTridiagonal full;
  full.diag.resize(m);
  full.off.assign(m > 0 ? m - 1 : 0, -0.5 * kin);
  for (int j = 0; j < m; ++j) full.diag[j] = kin + potential(grid.x(j + 1));

  std::vector<Level> levels;
  if (!parity) {
    levels = sector_levels(full, n_levels, 0);
    for (Level& l : levels) {
      std::vector<double> psi(grid.n_points, 0.0);
      std::copy(l.psi.begin(), l.psi.end(), psi.begin() + 1);
      l.psi = std::move(psi);
    }
  } else {
    const double e = -0.5 * kin;
    SymTridiagonal even, odd;
    const bool centre = m % 2 == 1;
    const int half = centre ? (m - 1) / 2 : m / 2;  // unknowns strictly left of the mirror line
    even.diag.assign(full.diag.begin(), full.diag.begin() + half);
    even.off.assign(full.off.begin(), full.off.begin() + std::max(half - 1, 0));
    odd = even;
    if (centre) {
      even.diag.push_back(full.diag[half]);
      even.off.push_back(std::sqrt(2.0) * e);
    } else {
      even.diag.back() += e;
      odd.diag.back() -= e;
    }
    for (int sector = 0; sector < 2; ++sector) {
      const int sign = sector == 0 ? 1 : -1;
      auto part = sector_levels(sector == 0 ? even : odd, n_levels, sign);
      for (Level& l : part) {
        std::vector<double> psi(grid.n_points, 0.0);
        for (int j = 0; j < half; ++j) {
          psi[1 + j] = l.psi[j];
          psi[m - j] = sign * l.psi[j];
        }
        if (centre && sign > 0) psi[1 + half] = std::sqrt(2.0) * l.psi[half];
        l.psi = std::move(psi);
        levels.push_back(std::move(l));
      }
    }
    std::sort(levels.begin(), levels.end(),
              [](const Level& a, const Level& b) { return a.energy < b.energy; });
    if (truncate && static_cast<int>(levels.size()) > n_levels) levels.resize(n_levels);
  }
  for (Level& l : levels) finish_vector(l.psi, h);
  return levels;
}

bool potential_is_even(const PotentialModel& model) {
  const auto& c = model.coefficients();
  for (std::size_t k = 1; k < c.size(); k += 2)
    if (c[k] != 0.0) return false;
  return true;
}

}  // namespace

SpectralResult diagonalize_schrodinger(const PotentialModel& model, const GridSpec& grid, int n_levels,
                                       const SchrodingerOptions& options) {
  return diagonalize_schrodinger([&model](double x) { return model.value(x); },
                                 potential_is_even(model), grid, n_levels, options);
}

SpectralResult diagonalize_schrodinger(const std::function<double(double)>& potential, bool even,
                                       const GridSpec& grid, int n_levels,
                                       const SchrodingerOptions& options) {
  if (grid.n_points < 3) throw Error(ErrorKind::Config, "grid needs at least 3 points");
  if (!(grid.x_max > grid.x_min)) throw Error(ErrorKind::Config, "grid needs x_max > x_min");
  if (!(grid.hbar > 0.0)) throw Error(ErrorKind::Config, "hbar must be positive");
  if (n_levels < 1 || n_levels > grid.n_points - 2)
    throw Error(ErrorKind::Config, "n_levels must be between 1 and the number of interior points");

  const double span = grid.x_max - grid.x_min;
  const bool parity = options.use_parity && even &&
                      std::abs(grid.x_min + grid.x_max) <= 1e-12 * span && grid.n_points >= 5;

  GridSpec fine = grid;
  fine.n_points = 2 * grid.n_points - 1;
  const auto coarse_levels = solve_grid(potential, parity, grid, n_levels, false);
  auto fine_levels = solve_grid(potential, parity, fine, n_levels);

  SpectralResult r;
  r.grid = fine;
  r.coarse_grid = grid;
  for (Level& f : fine_levels) {
    const Level* match = nullptr;
    for (const Level& c : coarse_levels)
      if (c.parity == f.parity && c.index == f.index) match = &c;
    if (!match) throw Error(ErrorKind::Numeric, "grid too coarse: levels do not match between grids");
    r.energies.push_back((4.0 * f.energy - match->energy) / 3.0);
    r.error_estimates.push_back(std::abs(f.energy - match->energy) / 3.0);
    r.parity.push_back(f.parity);
    r.coarse_wavefunctions.push_back(match->psi);
    r.wavefunctions.push_back(std::move(f.psi));
  }

  double scale = 0.0;
  for (double e : r.energies) scale = std::max(scale, std::abs(e));
  scale += r.energies.back() - r.energies.front();
  for (std::size_t k = 0; k < r.energies.size(); ++k) {
    if (r.error_estimates[k] > options.richardson_tol * scale) {
      std::ostringstream msg;
      msg << "grid too coarse: Richardson estimate " << r.error_estimates[k] << " for level " << k;
      throw Error(ErrorKind::Numeric, msg.str());
    }
    const auto& psi = r.wavefunctions[k];
    double peak = 0.0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(psi[1]), std::abs(psi[psi.size() - 2]));
    if (edge > options.edge_tol * peak) {
      std::ostringstream msg;
      msg << "grid too narrow: level " << k << " has relative edge amplitude " << edge / peak;
      throw Error(ErrorKind::Numeric, msg.str());
    }
  }
  return r;
}

namespace {

double lagrange4(const std::vector<double>& y, const GridSpec& g, double x) {
  const double h = g.spacing();
  const double s = (x - g.x_min) / h;
  int j0 = static_cast<int>(std::floor(s)) - 1;
  j0 = std::clamp(j0, 0, g.n_points - 4);
  double out = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (s - (j0 + b)) / static_cast<double>(a - b);
    out += w * y[j0 + a];
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> endpoint_wavefunction_values(const SpectralResult& spec,
                                                              std::span<const double> positions) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < spec.wavefunctions.size(); ++k) {
    const auto& f = spec.wavefunctions[k];
    const auto& c = spec.coarse_wavefunctions[k];
    std::size_t peak = 0;
    for (std::size_t j = 0; j < f.size(); ++j)
      if (std::abs(f[j]) > std::abs(f[peak])) peak = j;
    const double xp = spec.grid.x(static_cast<int>(peak));
    const double align = lagrange4(c, spec.coarse_grid, xp) * f[peak] < 0.0 ? -1.0 : 1.0;
    std::vector<double> row;
    for (double x : positions) {
      if (x < spec.grid.x_min || x > spec.grid.x_max)
        throw Error(ErrorKind::Config, "position outside the oracle grid");
      const double vf = lagrange4(f, spec.grid, x);
      const double vc = align * lagrange4(c, spec.coarse_grid, x);
      row.push_back(std::abs((4.0 * vf - vc) / 3.0));
    }
    out.push_back(std::move(row));
  }
  return out;
}

FluctuationSpectrum diagonalize_fluctuation(const FluctuationOperator& op, int n_points) {
  using Real = long double;
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  if (!op.w) throw Error(ErrorKind::Config, "fluctuation operator has no potential");
  const Real len = static_cast<Real>(op.tau_f) - static_cast<Real>(op.tau_i);
  if (!(len > 0)) throw Error(ErrorKind::Config, "window must satisfy tau_i < tau_f");
  if (n_points <= 0) {
    const double rate = std::max({op.omega_i, op.omega_f, 1.0 / static_cast<double>(len)});
    n_points = static_cast<int>(std::ceil(static_cast<double>(len) * rate / 0.1));
  }
  if (n_points < 3) throw Error(ErrorKind::Config, "fluctuation oracle needs at least 3 points");

  const int n = n_points;
  const Real pi = std::numbers::pi_v<Real>;
  const Real np1 = n + 1;
  // Exact sine-basis kinetic matrix  sum_k (2/(N+1)) sin(k pi i/(N+1)) sin(k pi j/(N+1)) (k pi / L)^2.
  const Real pref = pi * pi / (2 * len * len);
  Matrix h(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      Real v;
      if (i == j) {
        const Real s = std::sin(pi * i / np1);
        v = pref * ((2 * np1 * np1 + 1) / 3 - 1 / (s * s));
      } else {
        const Real sm = std::sin(pi * (i - j) / (2 * np1));
        const Real sp = std::sin(pi * (i + j) / (2 * np1));
        v = pref * ((i - j) % 2 == 0 ? 1 : -1) * (1 / (sm * sm) - 1 / (sp * sp));
      }
      h(i - 1, j - 1) = v;
    }
    const Real tau = static_cast<Real>(op.tau_i) + len * i / np1;
    h(i - 1, i - 1) += static_cast<Real>(op.w(static_cast<double>(tau)));
  }

  Eigen::LDLT<Matrix> ldlt(h);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::Numeric, "fluctuation oracle factorization failed");
  Vector v = Vector::Ones(n);
  v.normalize();
  Real lambda = 0;
  for (int it = 0; it < 500; ++it) {
    const Vector y = ldlt.solve(v);
    const Real next = v.squaredNorm() / v.dot(y);
    v = y.normalized();
    const bool done = it > 1 && std::abs(next - lambda) <= 1e-16L * std::abs(next);
    lambda = next;
    if (done) break;
  }

  const Real peak = v.cwiseAbs().maxCoeff();
  int nodes = 0, last = 0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(v(j)) <= 1e-10L * peak) continue;
    const int s = v(j) > 0 ? 1 : -1;
    if (last != 0 && s != last) ++nodes;
    last = s;
  }
  return FluctuationSpectrum{static_cast<double>(lambda), nodes, n};
}

double nested_simplex_integral(int n, const TwoLevelSystem& sys, double tau) {
  if (n < 1 || n > 3) throw Error(ErrorKind::Config, "nested simplex oracle supports N = 1, 2, 3");
  if (!(tau >= 0.0)) throw Error(ErrorKind::Config, "tau must be non-negative");
  const double k = std::sqrt(static_cast<double>(sys.degeneracy)) * sys.big_k;
  auto rate = [&](int segment) { return (segment % 2 == 0 ? sys.e_i : sys.e_f) / sys.hbar; };
  const double fastest = std::max(sys.e_i, sys.e_f) / sys.hbar;
  // weight(m, t): all m hops inside [0, t], the last segment ending at t.
  // Composite Gauss-Legendre per level; panels keep rate * panel length below 4.
  std::function<double(int, double)> weight = [&](int m, double t) -> double {
    if (m == 0) return std::exp(-rate(0) * t);
    const int panels = 1 + static_cast<int>(fastest * t / 4.0);
    const double width = t / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p)
      sum += boost::math::quadrature::gauss<double, 30>::integrate(
          [&, m, t](double s) { return weight(m - 1, s) * std::exp(-rate(m) * (t - s)); }, p * width,
          (p + 1) * width);
    return sum;
  };
  return std::pow(k, n) * weight(n, tau);
}

std::array<double, 4> propagator_2x2(const TwoLevelSystem& sys, double tau) {
  const double x = tau / sys.hbar;
  const double c = sys.coupling();
  const double mean = 0.5 * (sys.e_i + sys.e_f);
  const double half = 0.5 * (sys.e_f - sys.e_i);
  const double r = std::hypot(half, c);
  double a, b;
  if (x * r < 300.0) {
    const double decay = std::exp(-x * mean);
    a = decay * std::cosh(x * r);
    b = r > 0.0 ? decay * std::sinh(x * r) / r : x * decay;
  } else {
    const double lo = std::exp(-x * (mean - r)), hi = std::exp(-x * (mean + r));
    a = 0.5 * (lo + hi);
    b = 0.5 * (lo - hi) / r;
  }
  // exp(-x H) = a I - b (H - mean I)
  return {a + b * half, b * c, b * c, a - b * half};
}

}  // namespace multiwell
