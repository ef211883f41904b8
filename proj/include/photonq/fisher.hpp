#pragma once

// Classical Fisher information of the three-basis number-counting protocol.

#include "photonq/core_states.hpp"
#include "photonq/optimize.hpp"
#include "photonq/parallel.hpp"

#include <array>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace photonq {

struct FisherMatrix {
  enum class Param { euler, local };
  Mat3 entries = Mat3::Zero();
  Param parameterization = Param::euler;
};

// Single-photon basis change: (a', b')^T = r (a, b)^T.
struct BasisChangeSpec {
  cplx alpha_p;
  cplx beta_p;
  double zeta = 0;

  Mat2c r() const {
    const cplx ez = std::polar(1.0, zeta);
    Mat2c m;
    m << alpha_p, beta_p, -ez * std::conj(beta_p), ez * std::conj(alpha_p);
    return m;
  }
};

inline BasisChangeSpec basis_spec(PolarizationBasis b) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (b) {
    case PolarizationBasis::HV: return {1.0, 0.0, 0.0};
    case PolarizationBasis::DA: return {h, h, 0.0};
    case PolarizationBasis::RL: return {cplx(0, -h), h, -pi / 2};
  }
  return {1.0, 0.0, 0.0};
}

// Columns are the new basis states written in HV coordinates.
inline Mat2c basis_matrix(PolarizationBasis b) { return basis_spec(b).r().transpose(); }

// Process matrix as seen from basis b, in closed form. Equals R^+ K R with
// R = basis_matrix(b).
inline Su2Matrix basis_su2(const EulerAngles& p, PolarizationBasis b) {
  const BasisChangeSpec bs = basis_spec(b);
  const cplx a = bs.alpha_p, be = bs.beta_p;
  const double c = std::cos(p.psi2 / 2), s = std::sin(p.psi2 / 2);
  const double sg = (p.psi1 + p.psi3) / 2, dl = (p.psi3 - p.psi1) / 2;
  const cplx eis = std::polar(1.0, sg), eid = std::polar(1.0, dl);
  const cplx m11 = c * (std::norm(a) * eis + std::norm(be) / eis) +
                   s * (-std::conj(a) * be / eid + a * std::conj(be) * eid);
  const cplx m21 = std::polar(1.0, -bs.zeta) *
                   (cplx(0, -2) * a * be * c * std::sin(sg) + s * (a * a * eid + be * be / eid));
  Mat2c m;
  m << m11, -std::conj(m21), m21, std::conj(m11);
  return {m};
}

inline EulerAngles basis_euler(const EulerAngles& p, PolarizationBasis b) {
  if (b == PolarizationBasis::HV) return p;
  return euler_from_su2(basis_su2(p, b)).angles;
}

inline Eigen::VectorXd basis_probs(const TwoModePureState& st, const EulerAngles& p,
                                   PolarizationBasis b) {
  return outcome_probs(st, basis_euler(p, b));
}

struct FisherOptions {
  double step = 1e-5;
  double p_floor = 1e-12;
};

// Central difference at h and h/2 combined by one Richardson step.
template <class F>
Eigen::MatrixXd richardson_jacobian(F&& f, const Eigen::Vector3d& x, double h) {
  auto central = [&](int k, double hk) {
    Eigen::Vector3d xp = x, xm = x;
    xp(k) += hk;
    xm(k) -= hk;
    return Eigen::VectorXd((f(xp) - f(xm)) / (2 * hk));
  };
  Eigen::VectorXd col0 = central(0, h);
  Eigen::MatrixXd jac(col0.size(), 3);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd d1 = k == 0 ? col0 : central(k, h);
    Eigen::VectorXd d2 = central(k, h / 2);
    jac.col(k) = (4 * d2 - d1) / 3;
  }
  return jac;
}

inline FisherMatrix fisher_from_probs(const Eigen::VectorXd& p, const Eigen::MatrixXd& dp,
                                      double p_floor) {
  FisherMatrix f;
  bool any = false;
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) < p_floor) continue;
    any = true;
    Eigen::Vector3d g = dp.row(i).transpose();
    f.entries += g * g.transpose() / p(i);
  }
  if (!any) throw NumericalGuard("fisher: every outcome is below the probability floor");
  return f;
}

inline FisherMatrix fisher_single_basis(const TwoModePureState& st, const EulerAngles& p,
                                        PolarizationBasis b, const FisherOptions& opt = {}) {
  auto probs = [&](const Eigen::Vector3d& x) { return basis_probs(st, EulerAngles::from(x), b); };
  Eigen::MatrixXd dp = richardson_jacobian(probs, p.vec(), opt.step);
  return fisher_from_probs(probs(p.vec()), dp, opt.p_floor);
}

inline FisherMatrix fisher_total(const TwoModePureState& st, const EulerAngles& p,
                                 const FisherOptions& opt = {}) {
  FisherMatrix f;
  for (auto b : all_bases) f.entries += fisher_single_basis(st, p, b, opt).entries;
  return f;
}

// ---------------------------------------------------------------------------
// Jacobians of the basis maps

struct WMatrices {
  Mat3 jacobian[3];  // d psi'_i / d psi_k per basis (HV, DA, RL)
  Mat3 w[3];         // outer product of the psi'_2 row
};

inline WMatrices w_matrices(const EulerAngles& p, double h = 1e-5) {
  const double eps = 1e-6;
  if (p.psi2 < eps || p.psi2 > pi - eps)
    throw NumericalGuard("w_matrices: psi2 too close to gimbal lock");
  WMatrices out;
  for (int bi = 0; bi < 3; ++bi) {
    const auto b = all_bases[bi];
    const Eigen::Vector3d ref = basis_euler(p, b).vec();
    auto map = [&](const Eigen::Vector3d& x) {
      Eigen::Vector3d y = basis_euler(EulerAngles::from(x), b).vec();
      // unwrap psi1, psi3 against the reference point
      for (int k : {0, 2}) y(k) = ref(k) + std::remainder(y(k) - ref(k), two_pi);
      return Eigen::VectorXd(y);
    };
    out.jacobian[bi] = richardson_jacobian(map, p.vec(), h);
    Eigen::Vector3d row = out.jacobian[bi].row(1).transpose();
    out.w[bi] = row * row.transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Locally independent parameters

// J with d theta = J d psi, where K(psi + d psi) = K(psi) exp(i theta . s / sqrt 2).
inline Mat3 local_jacobian(const EulerAngles& p) {
  auto rz = [](double a) {
    Mat2c m;
    m << std::polar(1.0, a / 2), 0, 0, std::polar(1.0, -a / 2);
    return m;
  };
  auto ry = [](double b) {
    Mat2c m;
    m << std::cos(b / 2), -std::sin(b / 2), std::sin(b / 2), std::cos(b / 2);
    return m;
  };
  const cplx half_i(0, 0.5);
  const Mat2c k = su2_from_euler(p).m;
  Mat2c dk[3];
  dk[0] = half_i * pauli(2) * k;
  dk[1] = rz(p.psi1) * (-half_i * pauli(1)) * ry(p.psi2) * rz(p.psi3);
  dk[2] = k * (half_i * pauli(2));
  Mat3 j;
  for (int col = 0; col < 3; ++col) {
    Mat2c x = k.adjoint() * dk[col];  // = (i/2) n . sigma
    for (int a = 0; a < 3; ++a) j(a, col) = (cplx(0, -1) * (pauli(a) * x).trace()).real() / std::sqrt(2.0);
  }
  return j;
}

inline Mat3 v_matrix(const EulerAngles& p) {
  const double c = std::cos(p.psi2);
  Mat3 v;
  v << 1, 0, c, 0, 1, 0, c, 0, 1;
  return 0.5 * v;
}

inline FisherMatrix to_local(const FisherMatrix& f, const EulerAngles& p) {
  Mat3 jinv = local_jacobian(p).inverse();
  return {jinv.transpose() * f.entries * jinv, FisherMatrix::Param::local};
}

inline double condition_number(const Mat3& f) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(f);
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(2);
  if (!(lo > 0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

inline double trace_inverse_local(const FisherMatrix& f, const EulerAngles& p,
                                  double max_cond = 1e12) {
  if (!(condition_number(f.entries) < max_cond))
    throw NumericalGuard("trace_inverse_local: singular Fisher matrix, variance unbounded");
  return (v_matrix(p) * f.entries.inverse()).trace();
}

// ---------------------------------------------------------------------------
// Global minimum of the local-parameter variance

struct SearchOptions {
  int grid_n = 24;
  int refine_iters = 200;
  int restarts = 5;
  double tol = 1e-8;
  double psi2_margin = 0.05;
  double max_cond = 1e10;
  int threads = 1;
};

struct LandscapePoint {
  EulerAngles psi;
  double value;  // +inf where the Fisher matrix is singular
};

struct SearchResult {
  EulerAngles psi_star;
  double value = std::numeric_limits<double>::infinity();
  std::vector<LandscapePoint> landscape;
  std::vector<SimplexResult> refinements;
};

inline double min_trace_objective(const TwoModePureState& st, const EulerAngles& p,
                                  double psi2_margin = 0.05, double max_cond = 1e10) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (p.psi2 < psi2_margin || p.psi2 > pi - psi2_margin) return inf;
  try {
    FisherMatrix f = fisher_total(st, p);
    double v = trace_inverse_local(f, p, max_cond);
    return v > 0 ? v : inf;
  } catch (const NumericalGuard&) {
    return inf;
  }
}

inline SearchResult min_trace_search(const TwoModePureState& st, int grid_n, int refine_iters,
                                     std::uint64_t seed, SearchOptions opt = {}) {
  if (grid_n < 8) throw DomainError("min_trace_search: grid_n must be >= 8");
  opt.grid_n = grid_n;
  opt.refine_iters = refine_iters;
  const int g = grid_n;
  const double d13 = two_pi / g;
  const double lo2 = opt.psi2_margin, hi2 = pi - opt.psi2_margin;
  const double d2 = (hi2 - lo2) / (g - 1);

  SearchResult res;
  res.landscape.resize(static_cast<std::size_t>(g) * g * g);
  parallel_for(res.landscape.size(), opt.threads, [&](std::size_t i) {
    const int i1 = static_cast<int>(i / (g * g)), i2 = static_cast<int>((i / g) % g),
              i3 = static_cast<int>(i % g);
    EulerAngles p{i1 * d13, lo2 + i2 * d2, i3 * d13};
    res.landscape[i] = {p, min_trace_objective(st, p, opt.psi2_margin, opt.max_cond)};
  });

  std::vector<std::size_t> order(res.landscape.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return res.landscape[a].value < res.landscape[b].value;
  });
  if (!std::isfinite(res.landscape[order[0]].value))
    throw NumericalGuard("min_trace_search: every grid point is degenerate");

  auto rng = stream_rng(seed, 0x5ea7c4);
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  auto obj = [&](const Eigen::VectorXd& x) {
    return min_trace_objective(st, {x(0), x(1), x(2)}, opt.psi2_margin, opt.max_cond);
  };
  SimplexOptions so{opt.refine_iters, opt.tol, opt.tol};
  const int starts = std::min<int>(opt.restarts, static_cast<int>(order.size()));
  for (int s = 0; s < starts; ++s) {
    const auto& start = res.landscape[order[s]];
    if (!std::isfinite(start.value)) break;
    Eigen::VectorXd step(3);
    step << 0.5 * d13 * jitter(rng), 0.5 * d2 * jitter(rng), 0.5 * d13 * jitter(rng);
    SimplexResult r = nelder_mead(obj, start.psi.vec(), step, so);
    if (r.value < res.value) {
      res.value = r.value;
      res.psi_star = EulerAngles{r.x(0), r.x(1), r.x(2)}.canonical();
    }
    res.refinements.push_back(std::move(r));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Maximum-likelihood estimation

struct MleOptions {
  int repetitions = 200;
  int max_iters = 4000;
  double xtol = 1e-10;
  double ftol = 1e-14;
  double p_floor = 1e-12;
  int threads = 1;
};

struct MleResult {
  EulerAngles psi_hat;  // mean estimate over repetitions
  Mat3 emp_cov = Mat3::Zero();
  std::vector<Eigen::Vector3d> estimates;
  int failures = 0;  // repetitions whose optimizer did not converge
};

using BasisCounts = std::array<Eigen::VectorXd, 3>;

inline BasisCounts sample_counts(const TwoModePureState& st, const EulerAngles& truth, int shots,
                                 std::uint64_t seed, std::uint64_t rep) {
  BasisCounts counts;
  for (int bi = 0; bi < 3; ++bi) {
    Eigen::VectorXd p = basis_probs(st, truth, all_bases[bi]);
    auto rng = stream_rng(seed, bi, rep);
    counts[bi] = Eigen::VectorXd::Zero(p.size());
    // multinomial as a chain of conditional binomials
    int left = shots;
    double mass = 1.0;
    for (int k = 0; k < p.size() && left > 0; ++k) {
      if (k == p.size() - 1) {
        counts[bi](k) = left;
        break;
      }
      double q = mass > 0 ? std::clamp(p(k) / mass, 0.0, 1.0) : 0.0;
      int c = std::binomial_distribution<int>(left, q)(rng);
      counts[bi](k) = c;
      left -= c;
      mass -= p(k);
    }
  }
  return counts;
}

inline double log_likelihood(const TwoModePureState& st, const EulerAngles& p,
                             const BasisCounts& counts, double p_floor = 1e-12) {
  double ll = 0;
  for (int bi = 0; bi < 3; ++bi) {
    Eigen::VectorXd q = basis_probs(st, p, all_bases[bi]);
    for (int k = 0; k < q.size(); ++k)
      if (counts[bi](k) > 0) ll += counts[bi](k) * std::log(std::max(q(k), p_floor));
  }
  return ll;
}

inline SimplexResult maximize_likelihood(const TwoModePureState& st, const BasisCounts& counts,
                                         const EulerAngles& start, const MleOptions& opt = {}) {
  double total = 0;
  for (const auto& c : counts) total += c.sum();
  auto nll = [&](const Eigen::VectorXd& x) {
    return -log_likelihood(st, {x(0), x(1), x(2)}, counts, opt.p_floor) / total;
  };
  SimplexOptions so{opt.max_iters, opt.ftol, opt.xtol};
  Eigen::Vector3d step = Eigen::Vector3d::Constant(0.02);
  SimplexResult r = nelder_mead(nll, start.vec(), step, so);
  // one restart around the first answer guards against a collapsed simplex
  SimplexResult r2 = nelder_mead(nll, r.x, step / 10, so);
  r2.iterations += r.iterations;
  return r2.value <= r.value ? r2 : r;
}

inline MleResult mle_estimate(const TwoModePureState& st, const EulerAngles& psi_true,
                              int shots_per_basis, std::uint64_t seed, const MleOptions& opt = {}) {
  if (shots_per_basis < 100) throw DomainError("mle_estimate: shots_per_basis must be >= 100");
  if (!(condition_number(fisher_total(st, psi_true).entries) < 1e12))
    throw NumericalGuard("mle_estimate: Fisher matrix singular at the true parameters");

  MleResult res;
  res.estimates.resize(opt.repetitions);
  std::vector<char> ok(opt.repetitions, 1);
  parallel_for(opt.repetitions, opt.threads, [&](std::size_t rep) {
    BasisCounts counts = sample_counts(st, psi_true, shots_per_basis, seed, rep);
    SimplexResult r = maximize_likelihood(st, counts, psi_true, opt);
    res.estimates[rep] = r.x;
    ok[rep] = r.converged;
  });
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& e : res.estimates) mean += e;
  mean /= opt.repetitions;
  for (const auto& e : res.estimates) res.emp_cov += (e - mean) * (e - mean).transpose();
  res.emp_cov /= std::max(1, opt.repetitions - 1);
  for (char c : ok) res.failures += c ? 0 : 1;
  res.psi_hat = EulerAngles::from(mean);
  return res;
}

}  // namespace photonq
