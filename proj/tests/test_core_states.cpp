#include "catch_amalgamated.hpp"
#include "oracle.hpp"

#include "photonq/core_states.hpp"

#include <random>

using namespace photonq;
using Catch::Matchers::WithinAbs;

namespace {

TwoModePureState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec c(n + 1);
  for (int i = 0; i <= n; ++i) c(i) = cplx(g(rng), g(rng));
  c.normalize();
  return TwoModePureState::from_amplitudes(c);
}

EulerAngles random_angles(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, two_pi), v(0, pi);
  return {u(rng), v(rng), u(rng)};
}

CMat d_oracle(int two_j, double beta) { return oracle::expm(cplx(0, -beta) * oracle::jy(two_j)); }

}  // namespace

TEST_CASE("wigner_d matches direct exponentiation of J_y") {
  CHECK_THAT(wigner_d(1, 1, 1, 0.0), WithinAbs(1.0, 1e-14));

  const double b = pi / 3;
  const double ref = d_oracle(1, b)(0, 0).real();
  CHECK_THAT(ref, WithinAbs(std::cos(b / 2), 1e-14));
  CHECK_THAT(wigner_d(1, 1, 1, b), WithinAbs(ref, 1e-12));
  CHECK_THAT(wigner_d(1, 1, 1, b), WithinAbs(0.8660254037844386, 1e-12));

  const double ref10 = d_oracle(2, pi / 2)(0, 1).real();
  CHECK_THAT(ref10, WithinAbs(-std::sqrt(0.5), 1e-12));
  CHECK_THAT(wigner_d(2, 2, 0, pi / 2), WithinAbs(ref10, 1e-12));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int two_j = 0; two_j <= 10; ++two_j) {
    const double beta = u(rng);
    CMat ref_m = d_oracle(two_j, beta);
    Eigen::MatrixXd d = wigner_d_matrix(two_j, beta);
    CHECK((d - ref_m.real()).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(ref_m.imag().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("wigner_d rows are orthonormal") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, two_pi);
  for (int two_j = 0; two_j <= 8; ++two_j) {
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::MatrixXd d = wigner_d_matrix(two_j, u(rng));
      const auto n = d.rows();
      CHECK((d * d.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("wigner_d rejects invalid quantum numbers") {
  CHECK_THROWS_AS(wigner_d(1, 3, 1, 0.1), DomainError);
  CHECK_THROWS_AS(wigner_d(2, 1, 0, 0.1), DomainError);
  CHECK_THROWS_AS(wigner_d(-1, 0, 0, 0.1), DomainError);
}

TEST_CASE("su2_from_euler") {
  CHECK((su2_from_euler({0, 0, 0}).m - Mat2c::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  Mat2c flip;
  flip << 0, -1, 1, 0;
  CHECK((su2_from_euler({0, pi, 0}).m - flip).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Mat2c m = su2_from_euler(random_angles(rng)).m;
    CHECK((m.adjoint() * m - Mat2c::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-10);
  }
}

TEST_CASE("su2_from_euler is the ordered product of rotations") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    EulerAngles p = random_angles(rng);
    CMat z1 = oracle::expm(cplx(0, p.psi1 / 2) * oracle::pauli(2));
    CMat y2 = oracle::expm(cplx(0, -p.psi2 / 2) * oracle::pauli(1));
    CMat z3 = oracle::expm(cplx(0, p.psi3 / 2) * oracle::pauli(2));
    CMat k = z1 * y2 * z3;
    CHECK((su2_from_euler(p).m - k).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("euler_from_su2 inverts su2_from_euler") {
  auto id = euler_from_su2({Mat2c::Identity()});
  CHECK_THAT(id.angles.psi1, WithinAbs(0, 1e-12));
  CHECK_THAT(id.angles.psi2, WithinAbs(0, 1e-12));
  CHECK_THAT(id.angles.psi3, WithinAbs(0, 1e-12));

  auto r = euler_from_su2(su2_from_euler({0.3, 1.1, 2.0}));
  CHECK_FALSE(r.degenerate);
  CHECK_THAT(r.angles.psi1, WithinAbs(0.3, 1e-12));
  CHECK_THAT(r.angles.psi2, WithinAbs(1.1, 1e-12));
  CHECK_THAT(r.angles.psi3, WithinAbs(2.0, 1e-12));

  Mat2c flip;
  flip << 0, -1, 1, 0;
  auto g = euler_from_su2({flip});
  CHECK(g.degenerate);
  CHECK_THAT(g.angles.psi2, WithinAbs(pi, 1e-12));
  CHECK_THAT(g.angles.psi3, WithinAbs(0, 1e-15));
  CHECK((su2_from_euler(g.angles).m - flip).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    EulerAngles p = random_angles(rng);
    auto back = euler_from_su2(su2_from_euler(p));
    CHECK_THAT(back.angles.psi1, WithinAbs(p.psi1, 1e-9));
    CHECK_THAT(back.angles.psi2, WithinAbs(p.psi2, 1e-9));
    CHECK_THAT(back.angles.psi3, WithinAbs(p.psi3, 1e-9));
  }
}

TEST_CASE("euler_from_su2 reproduces arbitrary SU(2) matrices up to sign") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    cplx a(g(rng), g(rng)), b(g(rng), g(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    a /= n;
    b /= n;
    Mat2c m;
    m << a, -std::conj(b), b, std::conj(a);
    Mat2c back = su2_from_euler(euler_from_su2({m}).angles).m;
    const double err = std::min((back - m).cwiseAbs().maxCoeff(), (back + m).cwiseAbs().maxCoeff());
    CHECK(err < 1e-9);
  }
}

TEST_CASE("gimbal lock at psi2 = 0 keeps the matrix") {
  Mat2c m = su2_from_euler({0.7, 0.0, 1.9}).m;
  auto r = euler_from_su2({m});
  CHECK(r.degenerate);
  CHECK(r.angles.psi3 == 0.0);
  Mat2c back = su2_from_euler(r.angles).m;
  CHECK(std::min((back - m).cwiseAbs().maxCoeff(), (back + m).cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("named states") {
  auto noon = named_state(StateKind::NOON, 2);
  CHECK_THAT(noon.amplitudes(0).real(), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK_THAT(std::abs(noon.amplitudes(1)), WithinAbs(0, 1e-15));
  CHECK_THAT(noon.amplitudes(2).real(), WithinAbs(std::sqrt(0.5), 1e-15));

  auto hb = named_state(StateKind::HB, 4);
  CHECK(hb.amplitudes(2) == cplx(1.0));
  CHECK(hb.amplitudes.cwiseAbs().sum() == 1.0);

  auto sp = named_state(StateKind::SymmetricPair, 2, 1);
  CHECK(sp.amplitudes(1) == cplx(1.0));
  CHECK_THAT(sp.amplitudes.squaredNorm(), WithinAbs(1.0, 1e-15));

  auto ya = named_state(StateKind::YurkeA, 4);
  CHECK_THAT(std::abs(ya.amplitudes(1)), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK_THAT(std::abs(ya.amplitudes(3)), WithinAbs(std::sqrt(0.5), 1e-15));
  auto yb = named_state(StateKind::YurkeB, 4);
  CHECK_THAT(std::abs(yb.amplitudes(2)), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK_THAT(std::abs(yb.amplitudes(3)), WithinAbs(std::sqrt(0.5), 1e-15));

  CHECK_THROWS_AS(named_state(StateKind::HB, 3), DomainError);
  CHECK_THROWS_AS(named_state(StateKind::YurkeA, 5), DomainError);
  CHECK_THROWS_AS(named_state(StateKind::SymmetricPair, 4, 5), DomainError);
  CHECK_THROWS_AS(TwoModePureState::from_amplitudes(CVec::Ones(3)), DomainError);
}

TEST_CASE("outcome_probs examples") {
  auto p = outcome_probs(named_state(StateKind::HB, 2), {0, 0, 0});
  CHECK_THAT(p(0), WithinAbs(0, 1e-14));
  CHECK_THAT(p(1), WithinAbs(1, 1e-14));
  CHECK_THAT(p(2), WithinAbs(0, 1e-14));

  for (double beta : {0.2, 1.0, 2.5}) {
    auto q = outcome_probs(TwoModePureState::fock(1, 1), {0, beta, 0});
    CHECK_THAT(q(1), WithinAbs(std::pow(std::cos(beta / 2), 2), 1e-12));
  }

  for (double psi3 : {0.0, 0.4, 2.9}) {
    auto q = outcome_probs(named_state(StateKind::NOON, 2), {0, 0, psi3});
    CHECK_THAT(q(0), WithinAbs(0.5, 1e-12));
    CHECK_THAT(q(2), WithinAbs(0.5, 1e-12));
  }
}

TEST_CASE("outcome_probs agrees with the 2x2 matrix route for one photon") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    auto st = random_state(1, rng);
    auto p = random_angles(rng);
    // (amplitude of |1,0>, amplitude of |0,1>) = (a, b)
    Eigen::Vector2cd ab(st.amplitudes(1), st.amplitudes(0));
    Eigen::Vector2cd out = su2_from_euler(p).m * ab;
    auto q = outcome_probs(st, p);
    CHECK_THAT(q(1), WithinAbs(std::norm(out(0)), 1e-12));
    CHECK_THAT(q(0), WithinAbs(std::norm(out(1)), 1e-12));
  }
}

TEST_CASE("outcome_probs agrees with the spin-space evolution") {
  std::mt19937_64 rng(37);
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      auto st = random_state(n, rng);
      auto p = random_angles(rng);
      CVec psi = oracle::tensor_power(CMat(su2_from_euler(p).m), n) * oracle::spin_state(st.amplitudes);
      CVec c = oracle::photon_amplitudes(psi, n);
      auto q = outcome_probs(st, p);
      for (int m = 0; m <= n; ++m) CHECK_THAT(q(m), WithinAbs(std::norm(c(m)), 1e-11));
    }
  }
}

TEST_CASE("outcome_probs is normalized") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> nn(1, 12);
  for (int i = 0; i < 200; ++i) {
    auto st = random_state(nn(rng), rng);
    CHECK_THAT(outcome_probs(st, random_angles(rng)).sum(), WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("correlators") {
  auto c = correlators(named_state(StateKind::HB, 2));
  CHECK_THAT(c.n_a, WithinAbs(1, 1e-14));
  CHECK_THAT(c.n_b, WithinAbs(1, 1e-14));
  CHECK_THAT(std::abs(c.ab), WithinAbs(0, 1e-14));

  auto f = correlators(TwoModePureState::fock(5, 5));
  CHECK_THAT(f.n_a, WithinAbs(5, 1e-14));
  CHECK_THAT(f.n_b, WithinAbs(0, 1e-14));
  CHECK_THAT(std::abs(f.ab), WithinAbs(0, 1e-14));
  CHECK_THAT(f.na2, WithinAbs(25, 1e-12));

  auto n1 = correlators(named_state(StateKind::NOON, 1));
  CHECK_THAT(n1.ab.real(), WithinAbs(0.5, 1e-14));

  // <a+b> = sum_M conj(c_{M+1}) c_M sqrt((N-M)(M+1))
  std::mt19937_64 rng(2);
  auto st = random_state(4, rng);
  cplx ref = 0;
  for (int m = 0; m < 4; ++m)
    ref += std::conj(st.amplitudes(m + 1)) * st.amplitudes(m) * std::sqrt(double((4 - m) * (m + 1)));
  CHECK(std::abs(correlators(st).ab - ref) < 1e-12);
}

TEST_CASE("reduced_one examples") {
  for (int n : {2, 4, 6}) {
    auto r = reduced_one(named_state(StateKind::HB, n)).matrix;
    CHECK((r - CMat::Identity(2, 2) / 2).cwiseAbs().maxCoeff() < 1e-14);
  }
  auto f = reduced_one(TwoModePureState::fock(3, 3)).matrix;
  CHECK_THAT(f(0, 0).real(), WithinAbs(1, 1e-14));
  CHECK_THAT(std::abs(f(1, 1)), WithinAbs(0, 1e-14));
  auto n1 = reduced_one(named_state(StateKind::NOON, 1)).matrix;
  CHECK((n1 - CMat::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(reduced_one(TwoModePureState::fock(0, 0)), DomainError);
}

TEST_CASE("reduced_two examples") {
  auto hb = reduced_two(named_state(StateKind::HB, 2));
  // The N=2 HB spin state is the triplet m=0, which is pure.
  CVec trip = CVec::Zero(4);
  trip(1) = trip(2) = std::sqrt(0.5);
  CHECK((hb.matrix - trip * trip.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

  auto noon = reduced_two(named_state(StateKind::NOON, 3));
  CHECK_THAT(pauli_coeff(noon, 2, 2), WithinAbs(0.25, 1e-14));
  CHECK_THAT(pauli_coeff(noon, 0, 0), WithinAbs(0, 1e-14));
  CHECK_THAT(pauli_coeff(noon, 1, 1), WithinAbs(0, 1e-14));
  CHECK_THROWS_AS(reduced_two(TwoModePureState::fock(1, 0)), DomainError);
}

TEST_CASE("reduced states match the brute-force spin construction") {
  std::vector<TwoModePureState> states;
  for (int n = 1; n <= 4; ++n) {
    states.push_back(named_state(StateKind::NOON, n));
    for (int m = 0; m <= n; ++m) {
      states.push_back(named_state(StateKind::Fock, n, m));
      states.push_back(named_state(StateKind::SymmetricPair, n, m));
    }
    if (n % 2 == 0) {
      states.push_back(named_state(StateKind::HB, n));
      states.push_back(named_state(StateKind::YurkeA, n));
      states.push_back(named_state(StateKind::YurkeB, n));
    }
  }
  std::mt19937_64 rng(43);
  for (int n = 1; n <= 4; ++n)
    for (int rep = 0; rep < 5; ++rep) states.push_back(random_state(n, rng));

  for (const auto& st : states) {
    const int n = st.n_total;
    CVec psi = oracle::spin_state(st.amplitudes);
    REQUIRE_THAT(psi.squaredNorm(), WithinAbs(1.0, 1e-12));
    CHECK((reduced_one(st).matrix - oracle::reduce_first(psi, n, 1)).cwiseAbs().maxCoeff() < 1e-10);
    if (n >= 2)
      CHECK((reduced_two(st).matrix - oracle::reduce_first(psi, n, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("reduced_two is a symmetric density matrix consistent with reduced_one") {
  std::mt19937_64 rng(47);
  CMat swap = CMat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1;
  for (int i = 0; i < 50; ++i) {
    auto st = random_state(2 + i % 9, rng);
    CMat r2 = reduced_two(st).matrix;
    CHECK((r2 - r2.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THAT(r2.trace().real(), WithinAbs(1, 1e-10));
    Eigen::SelfAdjointEigenSolver<CMat> es(r2);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    CHECK((swap * r2 * swap - r2).cwiseAbs().maxCoeff() < 1e-12);
    CMat pt = CMat::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int e = 0; e < 2; ++e) pt(a, b) += r2(2 * a + e, 2 * b + e);
    CHECK((pt - reduced_one(st).matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("photon to spin mapping sends N00N to GHZ and HB to Dicke") {
  for (int n = 2; n <= 6; ++n) {
    CVec ghz = CVec::Zero(1 << n);
    ghz(0) = ghz((1 << n) - 1) = std::sqrt(0.5);
    CVec psi = oracle::spin_state(named_state(StateKind::NOON, n).amplitudes);
    CHECK((psi - ghz).cwiseAbs().maxCoeff() < 1e-14);
  }
  for (int n = 2; n <= 6; n += 2) {
    CVec psi = oracle::spin_state(named_state(StateKind::HB, n).amplitudes);
    const double amp = 1.0 / std::sqrt(oracle::binom(n, n / 2));
    for (int idx = 0; idx < (1 << n); ++idx) {
      const double expect = __builtin_popcount(idx) == n / 2 ? amp : 0.0;
      CHECK_THAT(psi(idx).real(), WithinAbs(expect, 1e-14));
    }
  }
}
