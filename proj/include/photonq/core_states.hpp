#pragma once

// Two-mode Fock states |M, N-M>, SU(2) Euler machinery and the photon/spin
// reduced states.
//
// Conventions used throughout:
//   * amplitudes[M] multiplies |M, N-M>, M photons in mode a.
//   * mode a is spin up. Single-particle matrices act on (a, b).
//   * the process is K(psi) = exp(i psi1 s_z/2) exp(-i psi2 s_y/2) exp(i psi3 s_z/2).
//   * wigner_d is <m'| exp(-i beta J_y) |m>.
//   * half-integers are passed doubled (two_j, two_m).

#include "photonq/common.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace photonq {

struct TwoModePureState {
  int n_total = 0;
  CVec amplitudes;

  static TwoModePureState from_amplitudes(CVec amps) {
    if (amps.size() < 1) throw DomainError("empty amplitude vector");
    double norm2 = amps.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12) throw DomainError("state not normalized");
    return {static_cast<int>(amps.size()) - 1, std::move(amps)};
  }

  static TwoModePureState fock(int n, int m) {
    if (n < 0 || m < 0 || m > n) throw DomainError("fock: need 0 <= m <= n");
    CVec c = CVec::Zero(n + 1);
    c(m) = 1.0;
    return {n, c};
  }
};

struct EulerAngles {
  double psi1 = 0, psi2 = 0, psi3 = 0;

  EulerAngles canonical() const {
    return {wrap_two_pi(psi1), std::clamp(psi2, 0.0, pi), wrap_two_pi(psi3)};
  }
  Eigen::Vector3d vec() const { return {psi1, psi2, psi3}; }
  static EulerAngles from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

struct Su2Matrix {
  Mat2c m;
};

enum class PolarizationBasis { HV, DA, RL };

inline constexpr PolarizationBasis all_bases[] = {
    PolarizationBasis::HV, PolarizationBasis::DA, PolarizationBasis::RL};

inline const char* to_string(PolarizationBasis b) {
  switch (b) {
    case PolarizationBasis::HV: return "HV";
    case PolarizationBasis::DA: return "DA";
    case PolarizationBasis::RL: return "RL";
  }
  return "?";
}

struct ReducedSpinState {
  int dim = 0;
  CMat matrix;
};

// ---------------------------------------------------------------------------
// Wigner d

namespace detail {

// J_y in the basis m = j, j-1, ..., -j.
inline CMat jy_matrix(int two_j) {
  const int n = two_j + 1;
  const double j = two_j / 2.0;
  CMat jy = CMat::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double m = j - i;  // raising |m> -> |m+1> lands on row i-1
    double amp = std::sqrt(j * (j + 1) - m * (m + 1));
    jy(i - 1, i) = cplx(0, -0.5 * amp);
    jy(i, i - 1) = cplx(0, 0.5 * amp);
  }
  return jy;
}

struct JyEigen {
  CMat vecs;
  Eigen::VectorXd vals;
};

inline const JyEigen& jy_eigen(int two_j) {
  static std::mutex mu;
  static std::unordered_map<int, JyEigen> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(two_j);
  if (it == cache.end()) {
    Eigen::SelfAdjointEigenSolver<CMat> es(jy_matrix(two_j));
    it = cache.emplace(two_j, JyEigen{es.eigenvectors(), es.eigenvalues()}).first;
  }
  return it->second;
}

}  // namespace detail

// Full (2j+1)x(2j+1) matrix, rows/cols ordered m = j..-j.
inline Eigen::MatrixXd wigner_d_matrix(int two_j, double beta) {
  if (two_j < 0) throw DomainError("wigner_d: j must be >= 0");
  const auto& e = detail::jy_eigen(two_j);
  Eigen::VectorXcd ph(e.vals.size());
  for (int k = 0; k < e.vals.size(); ++k) ph(k) = std::polar(1.0, -beta * e.vals(k));
  CMat d = e.vecs * ph.asDiagonal() * e.vecs.adjoint();
  return d.real();
}

inline double wigner_d(int two_j, int two_m_out, int two_m_in, double beta) {
  if (two_j < 0 || std::abs(two_m_out) > two_j || std::abs(two_m_in) > two_j ||
      (two_j - two_m_out) % 2 != 0 || (two_j - two_m_in) % 2 != 0)
    throw DomainError("wigner_d: invalid quantum numbers");
  auto d = wigner_d_matrix(two_j, beta);
  return d((two_j - two_m_out) / 2, (two_j - two_m_in) / 2);
}

// ---------------------------------------------------------------------------
// SU(2) and Euler angles

inline Su2Matrix su2_from_euler(const EulerAngles& p) {
  const double c = std::cos(p.psi2 / 2), s = std::sin(p.psi2 / 2);
  const double sum = (p.psi1 + p.psi3) / 2, dif = (p.psi3 - p.psi1) / 2;
  Mat2c m;
  m << std::polar(c, sum), -std::polar(s, -dif),
       std::polar(s, dif), std::polar(c, -sum);
  return {m};
}

struct EulerResult {
  EulerAngles angles;
  bool degenerate = false;
};

inline EulerResult euler_from_su2(const Su2Matrix& u, double gimbal_tol = 1e-12) {
  const cplx m11 = u.m(0, 0), m21 = u.m(1, 0);
  const double a11 = std::abs(m11);
  EulerResult r;
  r.angles.psi2 = 2.0 * std::acos(std::clamp(a11, 0.0, 1.0));
  if (a11 > 1.0 - gimbal_tol) {
    r.angles.psi1 = wrap_two_pi(2.0 * std::arg(m11));
    r.degenerate = true;
  } else if (a11 < gimbal_tol) {
    r.angles.psi1 = wrap_two_pi(-2.0 * std::arg(m21));
    r.degenerate = true;
  } else {
    r.angles.psi1 = wrap_two_pi(std::arg(m11) - std::arg(m21));
    r.angles.psi3 = wrap_two_pi(std::arg(m11) + std::arg(m21));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Named probe states

enum class StateKind { NOON, HB, YurkeA, YurkeB, Fock, SymmetricPair };

inline const char* to_string(StateKind k) {
  switch (k) {
    case StateKind::NOON: return "noon";
    case StateKind::HB: return "hb";
    case StateKind::YurkeA: return "yurke_a";
    case StateKind::YurkeB: return "yurke_b";
    case StateKind::Fock: return "fock";
    case StateKind::SymmetricPair: return "symmetric_pair";
  }
  return "?";
}

inline TwoModePureState named_state(StateKind kind, int n, int m = 0) {
  if (n < 0) throw DomainError("named_state: n must be >= 0");
  const double h = 1.0 / std::sqrt(2.0);
  CVec c = CVec::Zero(n + 1);
  auto need_even = [&] {
    if (n % 2 != 0) throw DomainError("named_state: even photon number required");
  };
  switch (kind) {
    case StateKind::NOON:
      if (n == 0) throw DomainError("named_state: NOON needs n >= 1");
      c(n) += h;
      c(0) += h;
      break;
    case StateKind::HB:
      need_even();
      c(n / 2) = 1.0;
      break;
    case StateKind::YurkeA:
      need_even();
      if (n < 2) throw DomainError("named_state: Yurke needs n >= 2");
      c(n / 2 - 1) = h;
      c(n / 2 + 1) = h;
      break;
    case StateKind::YurkeB:
      need_even();
      if (n < 2) throw DomainError("named_state: Yurke needs n >= 2");
      c(n / 2 + 1) = h;
      c(n / 2) = h;
      break;
    case StateKind::Fock:
      if (m < 0 || m > n) throw DomainError("named_state: need 0 <= m <= n");
      c(m) = 1.0;
      break;
    case StateKind::SymmetricPair:
      if (m < 0 || m > n) throw DomainError("named_state: need 0 <= m <= n");
      if (2 * m == n) {
        c(m) = 1.0;
      } else {
        c(m) = h;
        c(n - m) = h;
      }
      break;
  }
  return {n, c};
}

// ---------------------------------------------------------------------------
// Outcome probabilities

// P(M') for number counting after the process psi.
inline Eigen::VectorXd outcome_probs(const TwoModePureState& st, const EulerAngles& p) {
  const int n = st.n_total;
  const Eigen::MatrixXd d = wigner_d_matrix(n, p.psi2);
  const double half = n / 2.0;
  Eigen::VectorXcd phase_in(n + 1);
  for (int mm = 0; mm <= n; ++mm)
    phase_in(mm) = st.amplitudes(mm) * std::polar(1.0, p.psi3 * (mm - half));
  Eigen::VectorXd out(n + 1);
  for (int mo = 0; mo <= n; ++mo) {
    cplx acc = 0;
    for (int mm = 0; mm <= n; ++mm) acc += d(n - mo, n - mm) * phase_in(mm);
    // The outgoing phase exp(i psi1 m') has unit modulus.
    out(mo) = std::norm(acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ladder-operator correlators and reduced states

namespace detail {

// A vector over |M, n-M>, M = 0..n.
struct FockVec {
  int n;
  CVec c;
};

// mode 0 = a, mode 1 = b
inline FockVec lower(const FockVec& v, int mode) {
  if (v.n == 0) return {0, CVec::Zero(1)};
  FockVec r{v.n - 1, CVec::Zero(v.n)};
  for (int mm = 0; mm <= v.n; ++mm) {
    if (mode == 0) {
      if (mm > 0) r.c(mm - 1) += std::sqrt(double(mm)) * v.c(mm);
    } else {
      if (v.n - mm > 0) r.c(mm) += std::sqrt(double(v.n - mm)) * v.c(mm);
    }
  }
  return r;
}

inline cplx inner(const FockVec& x, const FockVec& y) { return x.c.dot(y.c); }

}  // namespace detail

struct Correlators {
  double n_a = 0, n_b = 0;
  cplx ab, aaab, aabb, abbb;  // <a+b>, <a+a+ab>, <a+a+bb>, <a+b+bb>
  double na2 = 0, nanb = 0;   // <(a+a)^2>, <(a+a)(b+b)>
};

inline Correlators correlators(const TwoModePureState& st) {
  using detail::inner;
  using detail::lower;
  detail::FockVec v{st.n_total, st.amplitudes};
  auto a = lower(v, 0), b = lower(v, 1);
  auto aa = lower(a, 0), ab = lower(a, 1), bb = lower(b, 1);
  Correlators c;
  c.n_a = inner(a, a).real();
  c.n_b = inner(b, b).real();
  c.ab = inner(a, b);
  c.aaab = inner(aa, ab);
  c.aabb = inner(aa, bb);
  c.abbb = inner(ab, bb);
  c.na2 = inner(aa, aa).real() + c.n_a;
  c.nanb = inner(ab, ab).real();
  return c;
}

inline ReducedSpinState reduced_one(const TwoModePureState& st) {
  const int n = st.n_total;
  if (n < 1) throw DomainError("reduced_one: N >= 1 required");
  detail::FockVec v{n, st.amplitudes};
  detail::FockVec low[2] = {detail::lower(v, 0), detail::lower(v, 1)};
  CMat r(2, 2);
  // rho_ij = <a_j^+ a_i> / N
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = detail::inner(low[j], low[i]) / double(n);
  return {2, r};
}

inline ReducedSpinState reduced_two(const TwoModePureState& st) {
  const int n = st.n_total;
  if (n < 2) throw DomainError("reduced_two: N >= 2 required");
  detail::FockVec v{n, st.amplitudes};
  detail::FockVec two[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) two[i][j] = detail::lower(detail::lower(v, i), j);
  CMat r(4, 4);
  const double norm = double(n) * (n - 1);
  // rho_(ij),(kl) = <a_k^+ a_l^+ a_j a_i> / (N(N-1))
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          r(2 * i + j, 2 * k + l) = detail::inner(two[k][l], two[i][j]) / norm;
  return {4, r};
}

// Pauli matrices, index 0..2 = x, y, z.
inline Mat2c pauli(int k) {
  Mat2c s;
  switch (k) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

// Coefficient c_kl of s_k (x) s_l in a two-spin density matrix.
inline CMat kron2(const Mat2c& x, const Mat2c& y) {
  CMat r(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
  return r;
}

inline double pauli_coeff(const ReducedSpinState& r2, int k, int l) {
  CMat op = kron2(pauli(k), pauli(l));
  return (r2.matrix * op).trace().real() / 4.0;
}

}  // namespace photonq
