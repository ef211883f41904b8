#pragma once

// Brute-force references used only by the tests. Everything here works in
// the full 2^N spin space or with plain power series, independent of the
// ladder-operator and Wigner-d code paths.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// exp(A) by scaling and squaring a truncated Taylor series.
inline CMat expm(const CMat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  CMat x = a / std::pow(2.0, squarings);
  CMat term = CMat::Identity(a.rows(), a.cols()), sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / double(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// J_y for spin j = two_j / 2, basis m = j..-j, built from the raising operator.
inline CMat jy(int two_j) {
  const int n = two_j + 1;
  const double j = two_j / 2.0;
  CMat jp = CMat::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double m = j - i;
    jp(i - 1, i) = std::sqrt((j - m) * (j + m + 1));
  }
  return (jp - jp.adjoint()) / cplx(0, 2);
}

inline double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Qubit convention: bit value 0 is spin up (mode a). Qubit 0 is the most
// significant bit, so kron(x, y) puts x on qubit 0.
inline int popcount_down(int idx) { return __builtin_popcount(static_cast<unsigned>(idx)); }

// Symmetric spin state for sum_M c_M |M, N-M>: M spins up.
inline CVec spin_state(const CVec& c) {
  const int n = static_cast<int>(c.size()) - 1;
  CVec psi = CVec::Zero(1 << n);
  for (int idx = 0; idx < (1 << n); ++idx) {
    const int ups = n - popcount_down(idx);
    psi(idx) = c(ups) / std::sqrt(binom(n, ups));
  }
  return psi;
}

inline CMat kron(const CMat& x, const CMat& y) {
  CMat r(x.rows() * y.rows(), x.cols() * y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) r.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return r;
}

inline CVec kron(const CVec& x, const CVec& y) {
  CVec r(x.size() * y.size());
  for (int i = 0; i < x.size(); ++i) r.segment(i * y.size(), y.size()) = x(i) * y;
  return r;
}

inline CMat tensor_power(const CMat& u, int n) {
  CMat r = CMat::Identity(1, 1);
  for (int i = 0; i < n; ++i) r = kron(r, u);
  return r;
}

// Reduced state of the first k qubits of an n-qubit pure state.
inline CMat reduce_first(const CVec& psi, int n, int k) {
  const int keep = 1 << k, rest = 1 << (n - k);
  CMat r = CMat::Zero(keep, keep);
  for (int i = 0; i < keep; ++i)
    for (int j = 0; j < keep; ++j)
      for (int e = 0; e < rest; ++e) r(i, j) += psi(i * rest + e) * std::conj(psi(j * rest + e));
  return r;
}

// Dicke projection: amplitudes over M' = 0..N of a symmetric spin state.
inline CVec photon_amplitudes(const CVec& psi, int n) {
  CVec c = CVec::Zero(n + 1);
  for (int idx = 0; idx < (1 << n); ++idx) {
    const int ups = n - popcount_down(idx);
    c(ups) += psi(idx) / std::sqrt(binom(n, ups));
  }
  return c;
}

inline CMat pauli(int k) {
  CMat s(2, 2);
  if (k == 0) s << 0, 1, 1, 0;
  if (k == 1) s << 0, cplx(0, -1), cplx(0, 1), 0;
  if (k == 2) s << 1, 0, 0, -1;
  return s;
}

// sum_i op^(i) over n qubits.
inline CMat collective(const CMat& op, int n) {
  const int dim = 1 << n;
  CMat g = CMat::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    CMat term = CMat::Identity(1, 1);
    for (int q = 0; q < n; ++q) term = kron(term, q == i ? op : CMat(CMat::Identity(2, 2)));
    g += term;
  }
  return g;
}

// Pure-state QFI 4 Cov(G_a, G_b) for generators G_a = sum_i s_a^(i) / sqrt 2.
inline Eigen::Matrix3d pure_qfi(const CVec& psi, int n) {
  CMat g[3];
  for (int a = 0; a < 3; ++a) g[a] = collective(pauli(a), n) / std::sqrt(2.0);
  Eigen::Matrix3d out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const cplx gab = psi.dot(0.5 * (g[a] * g[b] + g[b] * g[a]) * psi);
      const cplx ga = psi.dot(g[a] * psi), gb = psi.dot(g[b] * psi);
      out(a, b) = 4 * (gab - ga * gb).real();
    }
  return out;
}

}  // namespace oracle
