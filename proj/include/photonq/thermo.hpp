#pragma once

// Work and entropy statistics of a two-mode squeezing quench
//   H = w (a+a + b+b + 1)  ->  H~ = w~ (a+a + b+b + 1),  S(r) = exp(r (a+b+ - ab)),
// starting from a thermal state at temperature T.

#include "photonq/common.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace photonq {

struct SqueezeQuench {
  double omega_in = 1.0;
  double omega_out = 1.0;
  double r = 0.0;
  double temp = 1.0;
  int cutoff = 0;  // photons per mode; 0 selects automatically

  double temp_out() const { return omega_out / omega_in * temp; }  // T~ = (w~/w) T
  double boltzmann_ratio() const { return std::exp(-omega_in / temp); }
  double mean_occupation() const {  // per mode
    const double x = boltzmann_ratio();
    return x / (1 - x);
  }

  void validate() const {
    if (!(omega_in > 0 && omega_out > 0)) throw DomainError("SqueezeQuench: frequencies must be > 0");
    if (!(r >= 0)) throw DomainError("SqueezeQuench: r must be >= 0");
    if (!(temp > 0)) throw DomainError("SqueezeQuench: temperature must be > 0");
  }
};

// <m_a, m_b| S(r) |n_a, n_b> on the truncated space n_a, n_b <= cutoff,
// stored per block of fixed d = n_a - n_b.
class SqueezeTable {
 public:
  SqueezeTable(double r, int cutoff) : r_(r), cutoff_(cutoff) {
    if (cutoff < 4) throw DomainError("squeeze_transition_matrix: cutoff must be >= 4");
    for (int d = -cutoff; d <= cutoff; ++d) {
      const int size = cutoff - std::abs(d) + 1;
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
      for (int k = 0; k + 1 < size; ++k) {
        const auto [na, nb] = occupation(d, k);
        const double amp = r * std::sqrt(double(na + 1) * (nb + 1));
        g(k + 1, k) = amp;
        g(k, k + 1) = -amp;
      }
      Eigen::MatrixXd s = g.exp();
      const double defect = (s.transpose() * s - Eigen::MatrixXd::Identity(size, size)).cwiseAbs().maxCoeff();
      if (defect > 1e-6) throw NumericalGuard("squeeze_transition_matrix: unitarity defect in block");
      blocks_.push_back(std::move(s));
    }
  }

  int cutoff() const { return cutoff_; }
  double r() const { return r_; }

  // Mode occupations of the k-th state in block d.
  static std::pair<int, int> occupation(int d, int k) { return d >= 0 ? std::pair{k + d, k} : std::pair{k, k - d}; }
  int block_size(int d) const { return cutoff_ - std::abs(d) + 1; }
  const Eigen::MatrixXd& block(int d) const { return blocks_[d + cutoff_]; }

  double amplitude(int ma, int mb, int na, int nb) const {
    if (ma - mb != na - nb) return 0.0;
    if (std::max({ma, mb, na, nb}) > cutoff_ || std::min({ma, mb, na, nb}) < 0) return 0.0;
    const int d = na - nb;
    return block(d)(std::min(ma, mb), std::min(na, nb));
  }

  // Deviation of the vacuum column from tanh^n(r) / cosh(r).
  double vacuum_column_error() const {
    const auto& b = block(0);
    double err = 0;
    for (int n = 0; n < b.rows(); ++n) {
      const double exact = std::pow(std::tanh(r_), n) / std::cosh(r_);
      err = std::max(err, std::abs(std::abs(b(n, 0)) - exact));
    }
    return err;
  }

 private:
  double r_;
  int cutoff_;
  std::vector<Eigen::MatrixXd> blocks_;
};

inline SqueezeTable squeeze_transition_matrix(double r, int cutoff) { return SqueezeTable(r, cutoff); }

// Probability that the evolved thermal state occupies a level within `band`
// of the per-mode cutoff. Amplitude that reaches the edge is reflected by the
// truncation, so this bounds the truncation error of every statistic.
inline double boundary_mass(const SqueezeQuench& q, const SqueezeTable& s, int band = 2) {
  const double x = q.boltzmann_ratio();
  const int c = s.cutoff();
  double mass = 0;
  for (int d = -c; d <= c; ++d) {
    const auto& b = s.block(d);
    for (int kn = 0; kn < b.cols(); ++kn) {
      const auto [na, nb] = SqueezeTable::occupation(d, kn);
      const double p = (1 - x) * (1 - x) * std::pow(x, na + nb);
      if (p < 1e-300) continue;
      for (int km = 0; km < b.rows(); ++km) {
        const auto [ma, mb] = SqueezeTable::occupation(d, km);
        if (std::max(ma, mb) > c - band) mass += p * b(km, kn) * b(km, kn);
      }
    }
  }
  return mass;
}

// Smallest cutoff (>= 16, grown geometrically) whose thermal tail and boundary
// mass are both below tol.
inline SqueezeTable auto_table(const SqueezeQuench& q, double tol = 1e-12) {
  const double x = q.boltzmann_ratio(), t2 = std::pow(std::tanh(q.r), 2);
  int c = 16;
  while (c < 512 && (1 - std::pow(1 - std::pow(x, c + 1), 2) >= tol || std::pow(t2, c + 1) >= tol)) ++c;
  for (;;) {
    SqueezeTable s(q.r, c);
    if (boundary_mass(q, s) < tol || c >= 512) return s;
    c = static_cast<int>(std::ceil(c * 1.25));
  }
}

inline SqueezeTable table_for(const SqueezeQuench& q) {
  return q.cutoff > 0 ? SqueezeTable(q.r, q.cutoff) : auto_table(q);
}

// ---------------------------------------------------------------------------
// Distributions. Atoms are keyed by integer totals and materialized on demand.

struct Atom {
  double value;
  double p;
};

struct WorkDistribution {
  std::vector<Atom> atoms;
  double total() const {
    double t = 0;
    for (const auto& a : atoms) t += a.p;
    return t;
  }
  double mean() const {
    double t = 0;
    for (const auto& a : atoms) t += a.p * a.value;
    return t;
  }
};

struct EntropyDistribution {
  enum class Direction { expansion, contraction };
  std::vector<Atom> atoms;
  Direction direction = Direction::expansion;
  double total() const {
    double t = 0;
    for (const auto& a : atoms) t += a.p;
    return t;
  }
  double mean() const {
    double t = 0;
    for (const auto& a : atoms) t += a.p * a.value;
    return t;
  }
};

namespace detail {

// Joint weights keyed by (initial total photons, final total photons).
// initial_out = false: thermal over H at T, then S.
// initial_out = true: thermal over H~ at T~, then S^+ (weights keyed the same way).
inline std::map<std::pair<int, int>, double> joint_totals(const SqueezeQuench& q,
                                                          const SqueezeTable& s, bool initial_out) {
  // Both thermal states have the same Boltzmann ratio because w/T = w~/T~.
  const double x = q.boltzmann_ratio();
  const double z1 = 1 - x;
  std::map<std::pair<int, int>, double> out;
  const int c = s.cutoff();
  for (int d = -c; d <= c; ++d) {
    const auto& b = s.block(d);
    for (int kn = 0; kn < b.cols(); ++kn) {
      const auto [na, nb] = SqueezeTable::occupation(d, kn);
      for (int km = 0; km < b.rows(); ++km) {
        const auto [ma, mb] = SqueezeTable::occupation(d, km);
        const double t = b(km, kn) * b(km, kn);
        if (t == 0) continue;
        const int start = initial_out ? ma + mb : na + nb;
        out[{na + nb, ma + mb}] += z1 * z1 * std::pow(x, start) * t;
      }
    }
  }
  return out;
}

}  // namespace detail

struct WorkPair {
  WorkDistribution forward;
  WorkDistribution reverse;
};

inline WorkPair work_distribution(const SqueezeQuench& q) {
  q.validate();
  SqueezeTable s = table_for(q);
  WorkPair w;
  for (const auto& [k, p] : detail::joint_totals(q, s, false))
    w.forward.atoms.push_back({q.omega_out * (k.second + 1) - q.omega_in * (k.first + 1), p});
  for (const auto& [k, p] : detail::joint_totals(q, s, true))
    w.reverse.atoms.push_back({q.omega_in * (k.first + 1) - q.omega_out * (k.second + 1), p});
  return w;
}

struct WorkMoments {
  double avg_w = 0, avg_w_ad = 0, w_fric = 0;
  double n_initial = 0, n_created = 0;
  // closed-form counterparts
  double avg_w_closed = 0, w_fric_closed = 0, n_created_closed = 0;
};

// <n>_cr = 2 sinh^2(r) (2 nbar + 1) for a thermal pair.
inline double created_quanta(const SqueezeQuench& q) {
  return 2 * std::pow(std::sinh(q.r), 2) * (2 * q.mean_occupation() + 1);
}

inline WorkMoments work_moments(const SqueezeQuench& q, const SqueezeTable& s,
                                double route_tol = 1e-6) {
  q.validate();
  const auto joint = detail::joint_totals(q, s, false);
  WorkMoments m;
  double ni = 0, nf = 0, w = 0;
  for (const auto& [k, p] : joint) {
    ni += p * k.first;
    nf += p * k.second;
    w += p * (q.omega_out * (k.second + 1) - q.omega_in * (k.first + 1));
  }
  m.avg_w = w;
  m.n_initial = ni;
  m.n_created = nf - ni;
  m.avg_w_ad = (q.omega_out - q.omega_in) * (2 * q.mean_occupation() + 1);
  m.w_fric = m.avg_w - m.avg_w_ad;
  m.n_created_closed = created_quanta(q);
  m.w_fric_closed = q.omega_out * m.n_created_closed;
  m.avg_w_closed = m.w_fric_closed + (q.omega_out - q.omega_in) * (2 * q.mean_occupation() + 1);
  if (std::abs(m.avg_w - m.avg_w_closed) > route_tol || std::abs(m.w_fric - m.w_fric_closed) > route_tol)
    throw NumericalGuard("work_moments: distribution and closed form disagree, cutoff too small");
  return m;
}

inline WorkMoments work_moments(const SqueezeQuench& q, double route_tol = 1e-6) {
  return work_moments(q, table_for(q), route_tol);
}

struct EntropyPair {
  EntropyDistribution expansion;
  EntropyDistribution contraction;
};

// Expansion atoms s = E~_m / T~ - E_n / T = (w/T)(M - N); contraction atoms sit at -s.
inline EntropyPair entropy_distributions(const SqueezeQuench& q, const SqueezeTable& s) {
  q.validate();
  const double beta_w = q.omega_in / q.temp;
  std::map<int, double> pe, pc;
  for (const auto& [k, p] : detail::joint_totals(q, s, false)) pe[k.second - k.first] += p;
  for (const auto& [k, p] : detail::joint_totals(q, s, true)) pc[k.first - k.second] += p;
  EntropyPair e;
  e.expansion.direction = EntropyDistribution::Direction::expansion;
  e.contraction.direction = EntropyDistribution::Direction::contraction;
  for (const auto& [d, p] : pe) e.expansion.atoms.push_back({beta_w * d, p});
  for (const auto& [d, p] : pc) e.contraction.atoms.push_back({beta_w * d, p});
  return e;
}

inline EntropyPair entropy_distributions(const SqueezeQuench& q) {
  return entropy_distributions(q, table_for(q));
}

inline double mean_exp_minus_s(const EntropyDistribution& e) {
  double t = 0;
  for (const auto& a : e.atoms) t += a.p * std::exp(-a.value);
  return t;
}

// Largest relative violation of e^s P_C(-s) = P_E(s) over expansion atoms.
inline double crooks_violation(const EntropyPair& e) {
  std::map<long, double> pc;
  auto key = [](double v) { return std::lround(v * 1e9); };
  for (const auto& a : e.contraction.atoms) pc[key(a.value)] += a.p;
  double worst = 0;
  for (const auto& a : e.expansion.atoms) {
    auto it = pc.find(key(-a.value));
    const double rhs = it == pc.end() ? 0.0 : std::exp(a.value) * it->second;
    const double scale = std::max(a.p, rhs);
    // subnormal probabilities carry no relative precision
    if (scale >= std::numeric_limits<double>::min()) worst = std::max(worst, std::abs(a.p - rhs) / scale);
  }
  return worst;
}

struct FluctuationReport {
  double avg_s = 0;
  double w_fric_over_t = 0;  // w_fric / T~
  double n_cr_identity = 0;  // w <n>_cr / T
  double rel_entropy = 0;    // K[rho_f || rho_ad]
  double w_fric = 0;
  double temp_out = 0;
  double mean_exp_minus_s = 0;
  double crooks_violation = 0;
  int cutoff = 0;
};

// K[rho_f || rho_ad] with rho_f = S rho S^+ and rho_ad thermal at T~ over H~.
inline double relative_entropy_final_adiabatic(const SqueezeQuench& q, const SqueezeTable& s) {
  const double x = q.boltzmann_ratio();
  const double log_z = 2 * std::log(1 - x);  // log of (1-x)^2, the normalization of both thermal states
  const int c = s.cutoff();
  double neg_entropy = 0, cross = 0;
  for (int d = -c; d <= c; ++d) {
    const auto& b = s.block(d);
    Eigen::VectorXd p(b.cols());
    for (int k = 0; k < b.cols(); ++k) {
      const auto [na, nb] = SqueezeTable::occupation(d, k);
      p(k) = (1 - x) * (1 - x) * std::pow(x, na + nb);
    }
    Eigen::MatrixXd rho = b * p.asDiagonal() * b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      const double l = es.eigenvalues()(k);
      if (l > 0) neg_entropy += l * std::log(l);
    }
    // -ln rho_ad = (w/T) M - log_z on the state with M total photons
    for (int k = 0; k < b.rows(); ++k) {
      const auto [ma, mb] = SqueezeTable::occupation(d, k);
      cross += rho(k, k) * ((q.omega_in / q.temp) * (ma + mb) - log_z);
    }
  }
  return neg_entropy + cross;
}

inline FluctuationReport fluctuation_report(const SqueezeQuench& q) {
  q.validate();
  const SqueezeTable s = table_for(q);
  const EntropyPair e = entropy_distributions(q, s);
  const WorkMoments m = work_moments(q, s);
  FluctuationReport rep;
  rep.cutoff = s.cutoff();
  rep.temp_out = q.temp_out();
  rep.avg_s = e.expansion.mean();
  rep.w_fric = m.w_fric;
  rep.w_fric_over_t = m.w_fric / rep.temp_out;
  rep.n_cr_identity = q.omega_in * m.n_created / q.temp;
  rep.rel_entropy = relative_entropy_final_adiabatic(q, s);
  rep.mean_exp_minus_s = mean_exp_minus_s(e.expansion);
  rep.crooks_violation = crooks_violation(e);
  return rep;
}

// <W> as Tr(H~ rho_f) - Tr(H rho) from the diagonal of the evolved state.
inline double average_work_operator(const SqueezeQuench& q, const SqueezeTable& s) {
  const double x = q.boltzmann_ratio();
  const int c = s.cutoff();
  double e_in = 0, e_out = 0;
  for (int d = -c; d <= c; ++d) {
    const auto& b = s.block(d);
    Eigen::VectorXd p(b.cols());
    for (int k = 0; k < b.cols(); ++k) {
      const auto [na, nb] = SqueezeTable::occupation(d, k);
      p(k) = (1 - x) * (1 - x) * std::pow(x, na + nb);
      e_in += p(k) * q.omega_in * (na + nb + 1);
    }
    Eigen::VectorXd diag = (b.array().square().matrix()) * p;
    for (int k = 0; k < b.rows(); ++k) {
      const auto [ma, mb] = SqueezeTable::occupation(d, k);
      e_out += diag(k) * q.omega_out * (ma + mb + 1);
    }
  }
  return e_out - e_in;
}

// ---------------------------------------------------------------------------
// Scenario maps to the squeezing parameter

struct CosmologyParams {
  double epsilon = 1, sigma = 1, k = 1, mass = 1;
};

struct ScenarioResult {
  double omega_in = 0, omega_out = 0, r = 0;
  double temperature = 0;  // Unruh or Hawking temperature where applicable
};

inline ScenarioResult r_from_cosmology(const CosmologyParams& p) {
  if (!(p.epsilon > 0 && p.sigma > 0 && p.k > 0 && p.mass > 0))
    throw DomainError("r_from_cosmology: parameters must be positive");
  ScenarioResult s;
  s.omega_in = std::sqrt(p.k * p.k + p.mass * p.mass);
  s.omega_out = std::sqrt(p.k * p.k + p.mass * p.mass * (1 + 2 * p.epsilon));
  const double t = std::sinh(pi * (s.omega_out - s.omega_in) / (2 * p.sigma)) /
                   std::sinh(pi * (s.omega_out + s.omega_in) / (2 * p.sigma));
  if (!(t >= 0 && t < 1)) throw NumericalGuard("r_from_cosmology: tanh r outside [0, 1)");
  s.r = std::atanh(t);
  return s;
}

// tanh r = exp(-c w / a), c = 2 pi by default.
inline ScenarioResult r_from_unruh(double accel, double omega, double exponent_const = two_pi) {
  if (!(accel > 0 && omega > 0)) throw DomainError("r_from_unruh: a and omega must be > 0");
  ScenarioResult s;
  s.omega_in = s.omega_out = omega;
  s.r = std::atanh(std::exp(-exponent_const * omega / accel));
  s.temperature = accel / two_pi;
  return s;
}

inline ScenarioResult r_from_blackhole(double mass_bh, double omega, double exponent_const = two_pi) {
  if (!(mass_bh > 0)) throw DomainError("r_from_blackhole: mass must be > 0");
  ScenarioResult s = r_from_unruh(1.0 / (4 * mass_bh), omega, exponent_const);
  s.temperature = 1.0 / (8 * pi * mass_bh);
  return s;
}

}  // namespace photonq
