#pragma once

// Quantum Fisher information of the three-basis protocol, assembled from the
// one- and two-particle reduced states of the probe.

#include "photonq/core_states.hpp"
#include "photonq/fisher.hpp"

namespace photonq {

namespace detail {

// I for one input orientation: 4 Cov(G_a, G_b) with G = sum_i s^(i) / sqrt 2.
inline Mat3 qfi_one_orientation(int n, const CMat& rho1, const CMat* rho2) {
  Mat2c t[3];
  for (int a = 0; a < 3; ++a) t[a] = pauli(a) / std::sqrt(2.0);
  cplx mean[3];
  for (int a = 0; a < 3; ++a) mean[a] = (rho1 * t[a]).trace();
  Mat3 out;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      cplx v = (rho1 * t[a] * t[b]).trace() - double(n) * mean[a] * mean[b];
      if (rho2 && n >= 2) v += double(n - 1) * (*rho2 * kron2(t[a], t[b])).trace();
      out(a, b) = 4.0 * n * v.real();
    }
  }
  return out;
}

}  // namespace detail

// Total QFI over the HV, DA and RL inputs, in the local parameters.
inline FisherMatrix qfi_total(const TwoModePureState& st) {
  const int n = st.n_total;
  if (n < 1) throw DomainError("qfi_total: N >= 1 required");
  const CMat r1 = reduced_one(st).matrix;
  CMat r2;
  if (n >= 2) r2 = reduced_two(st).matrix;
  FisherMatrix out{Mat3::Zero(), FisherMatrix::Param::local};
  for (auto b : all_bases) {
    // Measuring in basis b is the HV protocol applied to the input rotated by R_b.
    const Mat2c r = basis_matrix(b);
    CMat rho1 = r * r1 * r.adjoint();
    if (n >= 2) {
      CMat rr = kron2(r, r);
      CMat rho2 = rr * r2 * rr.adjoint();
      out.entries += detail::qfi_one_orientation(n, rho1, &rho2);
    } else {
      out.entries += detail::qfi_one_orientation(n, rho1, nullptr);
    }
  }
  return out;
}

inline double trace_inverse(const Mat3& m) { return m.inverse().trace(); }

struct SaturationReport {
  bool ok = false;
  ReducedSpinState rho1;
  double residual_na = 0, residual_nb = 0, residual_ab = 0;
};

inline SaturationReport saturation_check(const TwoModePureState& st, double tol = 1e-10) {
  if (st.n_total < 1) throw DomainError("saturation_check: N >= 1 required");
  const Correlators c = correlators(st);
  const double half = st.n_total / 2.0;
  SaturationReport r;
  r.rho1 = reduced_one(st);
  r.residual_na = std::abs(c.n_a - half);
  r.residual_nb = std::abs(c.n_b - half);
  r.residual_ab = std::abs(c.ab);
  r.ok = r.residual_na <= tol && r.residual_nb <= tol && r.residual_ab <= tol;
  return r;
}

struct OptimalityReport {
  bool ok = false;
  bool saturates = false;
  double c_zz = 0, c_xx = 0;
  double residual_aaab = 0, residual_aabb = 0, residual_abbb = 0;
  double residual_single_input = 0;  // only filled when single_input is requested
};

// single_input: require the stricter isotropic two-particle state needed when
// only the z-oriented input is used.
inline OptimalityReport optimality_check(const TwoModePureState& st, bool single_input = false,
                                         double tol = 1e-10) {
  if (st.n_total < 2) throw DomainError("optimality_check: N >= 2 required");
  OptimalityReport r;
  r.saturates = saturation_check(st, tol).ok;
  const Correlators c = correlators(st);
  r.residual_aaab = std::abs(c.aaab);
  r.residual_aabb = std::abs(c.aabb);
  r.residual_abbb = std::abs(c.abbb);
  const ReducedSpinState r2 = reduced_two(st);
  r.c_zz = pauli_coeff(r2, 2, 2);
  r.c_xx = pauli_coeff(r2, 0, 0);
  r.ok = r.saturates && r.residual_aaab <= tol && r.residual_aabb <= tol && r.residual_abbb <= tol;
  if (single_input) {
    CMat target = CMat::Identity(4, 4) / 4.0;
    for (int k = 0; k < 3; ++k) target += kron2(pauli(k), pauli(k)) / 12.0;
    r.residual_single_input = (r2.matrix - target).cwiseAbs().maxCoeff();
    r.ok = r.ok && r.residual_single_input <= tol;
  }
  return r;
}

inline double optimal_bound(int n) {
  if (n < 1) throw DomainError("optimal_bound: n >= 1 required");
  return 3.0 / (2.0 * n * (n + 2.0));
}

}  // namespace photonq
