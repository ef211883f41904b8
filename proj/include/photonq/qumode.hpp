#pragma once

// Measurement statistics of a squeezed control mode coupled to an n-qubit
// register: momentum densities, trace estimation and order finding.
// Units: x0 = 1, so callers only see the scaled momentum p_E.

#include "photonq/common.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace photonq {

struct QumodeProbe {
  double s0 = 1.0;
  double tau = 1.0;
  int n_qubits = 0;

  double width() const { return s0 * tau; }  // s0 tau, the inverse Gaussian width

  void validate() const {
    if (!(s0 >= 1.0)) throw DomainError("QumodeProbe: s0 must be >= 1");
    if (!(tau > 0.0)) throw DomainError("QumodeProbe: tau must be > 0");
  }
};

struct Eigenphase {
  double phi;
  long weight;
};

struct EigenphaseSpectrum {
  std::vector<Eigenphase> entries;
  long dim = 0;

  static EigenphaseSpectrum from_phases(const std::vector<double>& phases) {
    EigenphaseSpectrum s;
    for (double p : phases) s.entries.push_back({p, 1});
    s.dim = static_cast<long>(phases.size());
    return s;
  }

  void validate() const {
    long total = 0;
    for (const auto& e : entries) {
      if (e.weight < 1) throw DomainError("EigenphaseSpectrum: weights must be >= 1");
      total += e.weight;
    }
    if (total != dim || dim < 1) throw DomainError("EigenphaseSpectrum: weights must sum to dim");
  }

  // (sum_m c_m exp(i phi_m)) / dim
  cplx normalized_trace() const {
    cplx acc = 0;
    for (const auto& e : entries) acc += double(e.weight) * std::polar(1.0, e.phi);
    return acc / double(dim);
  }
};

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
};

// Gaussian mixture with one component per eigenphase, standard deviation
// 1 / (sqrt 2 s0 tau).
class MomentumDensity {
 public:
  MomentumDensity(EigenphaseSpectrum spec, QumodeProbe probe)
      : spec_(std::move(spec)), probe_(probe) {
    spec_.validate();
    probe_.validate();
  }

  double operator()(double p) const {
    const double w = probe_.width();
    double acc = 0;
    for (const auto& e : spec_.entries) acc += e.weight * std::exp(-w * w * (p - e.phi) * (p - e.phi));
    return w / (spec_.dim * std::sqrt(pi)) * acc;
  }

  double cdf(double p) const {
    const double w = probe_.width();
    double acc = 0;
    for (const auto& e : spec_.entries) acc += e.weight * 0.5 * std::erfc(-w * (p - e.phi));
    return acc / spec_.dim;
  }

  // E[exp(i p_E)] in closed form.
  cplx characteristic() const {
    const double w = probe_.width();
    return std::exp(-1.0 / (4 * w * w)) * spec_.normalized_trace();
  }

  const EigenphaseSpectrum& spectrum() const { return spec_; }
  const QumodeProbe& probe() const { return probe_; }

 private:
  EigenphaseSpectrum spec_;
  QumodeProbe probe_;
};

inline MomentumDensity momentum_pdf(const EigenphaseSpectrum& spec, const QumodeProbe& probe) {
  return MomentumDensity(spec, probe);
}

inline SampleBatch sample_momentum(const EigenphaseSpectrum& spec, const QumodeProbe& probe,
                                   long shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("sample_momentum: shots must be >= 1");
  spec.validate();
  probe.validate();
  std::vector<double> w;
  for (const auto& e : spec.entries) w.push_back(double(e.weight));
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::normal_distribution<double> noise(0.0, 1.0 / (std::sqrt(2.0) * probe.width()));
  auto rng = stream_rng(seed, 0x9e37);
  SampleBatch b{std::vector<double>(static_cast<std::size_t>(shots)), seed};
  for (auto& v : b.values) v = spec.entries[pick(rng)].phi + noise(rng);
  return b;
}

// F(s0) = sinh(1/(2 s0^2)) + exp(-1/(2 s0^2)).
inline double trace_shot_factor(double s0) {
  const double x = 1.0 / (2 * s0 * s0);
  return std::sinh(x) + std::exp(-x);
}

inline long trace_shots_required(double s0, double delta) {
  return static_cast<long>(std::ceil(trace_shot_factor(s0) / (delta * delta)));
}

struct TraceEstimate {
  cplx estimate;
  cplx analytic;
  long shots = 0;
};

inline TraceEstimate estimate_trace(const EigenphaseSpectrum& spec, const QumodeProbe& probe,
                                    long shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("estimate_trace: shots must be >= 1");
  SampleBatch b = sample_momentum(spec, probe, shots, seed);
  cplx acc = 0;
  for (double p : b.values) acc += std::polar(1.0, p);
  const double w = probe.width();
  return {std::exp(1.0 / (4 * w * w)) * acc / double(shots), spec.normalized_trace(), shots};
}

// Per-shot variances of the real and imaginary parts of the bias-corrected
// estimator exp(1/(4 w^2)) exp(i p_E).
inline std::pair<double, double> trace_estimator_variance(const EigenphaseSpectrum& spec,
                                                          const QumodeProbe& probe) {
  const double w = probe.width();
  const double a = 1.0 / (4 * w * w);
  double c1 = 0, s1 = 0, c2 = 0;
  for (const auto& e : spec.entries) {
    c1 += e.weight * std::cos(e.phi);
    s1 += e.weight * std::sin(e.phi);
    c2 += e.weight * std::cos(2 * e.phi);
  }
  c1 /= spec.dim;
  s1 /= spec.dim;
  c2 /= spec.dim;
  const double ecos2 = 0.5 * (1 + std::exp(-4 * a) * c2);
  const double esin2 = 0.5 * (1 - std::exp(-4 * a) * c2);
  const double scale = std::exp(2 * a);
  return {scale * (ecos2 - std::exp(-2 * a) * c1 * c1), scale * (esin2 - std::exp(-2 * a) * s1 * s1)};
}

inline double phase_success_prob(const QumodeProbe& probe, double delta_e) {
  if (!(delta_e > 0)) throw DomainError("phase_success_prob: delta_e must be > 0");
  return std::erf(probe.width() * delta_e);
}

// T_bound tau s0 delta_E. Reported, not thresholded.
inline double time_energy_product(double t_bound, const QumodeProbe& probe, double delta_e) {
  return t_bound * probe.tau * probe.s0 * delta_e;
}

inline std::vector<double> eigen_posterior(const EigenphaseSpectrum& spec, const QumodeProbe& probe,
                                           double p_e) {
  spec.validate();
  const double w = probe.width();
  std::vector<double> logw;
  for (const auto& e : spec.entries)
    logw.push_back(std::log(double(e.weight)) - w * w * (p_e - e.phi) * (p_e - e.phi));
  const double mx = *std::max_element(logw.begin(), logw.end());
  std::vector<double> out;
  double z = 0;
  for (double l : logw) {
    out.push_back(std::exp(l - mx));
    z += out.back();
  }
  for (double& v : out) v /= z;
  return out;
}

// ---------------------------------------------------------------------------
// Order finding

inline long mulmod(long a, long b, long m) {
  return static_cast<long>((static_cast<__int128>(a) * b) % m);
}

inline long powmod(long base, long exp, long m) {
  long r = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

struct Cycle {
  long length;
  long representative;
};

struct ModCycles {
  std::vector<Cycle> cycles;
  EigenphaseSpectrum spectrum;
  long order = 0;                     // lcm of the cycle lengths, the order of q
  std::optional<long> shortcut_factor;  // gcd(q, N) when it is nontrivial
};

inline ModCycles mod_cycles(long n_comp, long q) {
  if (!(1 < q && q < n_comp)) throw DomainError("mod_cycles: need 1 < q < N");
  ModCycles out;
  const long g = std::gcd(q, n_comp);
  if (g != 1) {
    out.shortcut_factor = g;
    return out;
  }
  std::vector<char> seen(static_cast<std::size_t>(n_comp), 0);
  std::map<std::pair<long, long>, long> mult;  // reduced (num, den) -> weight
  out.order = 1;
  for (long l = 1; l < n_comp; ++l) {
    if (seen[l]) continue;
    long len = 0, x = l;
    do {
      seen[x] = 1;
      x = mulmod(x, q, n_comp);
      ++len;
    } while (x != l);
    out.cycles.push_back({len, l});
    out.order = std::lcm(out.order, len);
    for (long m = 0; m < len; ++m) {
      long d = std::gcd(m, len);
      mult[{m / d, len / d}] += 1;
    }
  }
  std::vector<Eigenphase> e;
  for (const auto& [frac, w] : mult) e.push_back({two_pi * double(frac.first) / double(frac.second), w});
  std::sort(e.begin(), e.end(), [](const Eigenphase& a, const Eigenphase& b) { return a.phi < b.phi; });
  out.spectrum.entries = std::move(e);
  out.spectrum.dim = n_comp - 1;
  return out;
}

// Last convergent of x with denominator <= denom_max.
inline std::pair<long, long> continued_fraction(double x, long denom_max) {
  if (denom_max < 1) throw DomainError("continued_fraction: denom_max must be >= 1");
  long hm2 = 0, hm1 = 1, km2 = 1, km1 = 0;
  std::pair<long, long> best{0, 1};
  double rem = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(rem);
    if (a_real > 1e15) break;
    const long a = static_cast<long>(a_real);
    const long hn = a * hm1 + hm2, kn = a * km1 + km2;
    if (kn > denom_max) break;
    best = {hn, kn};
    hm2 = hm1;
    hm1 = hn;
    km2 = km1;
    km1 = kn;
    const double frac = rem - a_real;
    if (frac < 1e-12) break;
    rem = 1.0 / frac;
  }
  return best;
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Smallest p with n = p^k for some k >= 2, if any.
inline std::optional<long> prime_power_base(long n) {
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    long m = n;
    while (m % p == 0) m /= p;
    return m == 1 ? std::optional<long>(p) : std::nullopt;
  }
  return std::nullopt;
}

struct FactorRound {
  long q = 0;
  double p_e = 0;
  long num = 0, den = 0;
  std::string outcome;  // "factor", "odd_order", "trivial_root", "trivial_gcd", "classical"
  long factor = 0;
};

struct FactorResult {
  std::optional<long> factor;
  int rounds_used = 0;
  bool classical = false;
  std::vector<FactorRound> transcript;
};

// Rounds expected from the order-finding bound: e^gamma ln ln N / erf(pi s0 tau / N^2).
inline double factor_rounds_bound(long n_comp, double s0tau) {
  const double euler_gamma = 0.57721566490153286061;
  return std::exp(euler_gamma) * std::log(std::log(double(n_comp))) /
         std::erf(pi * s0tau / (double(n_comp) * n_comp));
}

inline FactorResult factor(long n_comp, const QumodeProbe& probe, std::uint64_t seed,
                           int max_rounds) {
  if (n_comp < 4) throw DomainError("factor: N must be composite");
  probe.validate();
  FactorResult res;
  auto classical = [&](long f) {
    res.factor = f;
    res.classical = true;
    res.transcript.push_back({0, 0, 0, 0, "classical", f});
    return res;
  };
  if (n_comp % 2 == 0) return classical(2);
  if (is_prime(n_comp)) throw DomainError("factor: N is prime");
  if (auto p = prime_power_base(n_comp)) return classical(*p);

  std::vector<long> coprime;
  for (long q = 2; q < n_comp; ++q)
    if (std::gcd(q, n_comp) == 1) coprime.push_back(q);

  for (int round = 0; round < max_rounds; ++round) {
    auto rng = stream_rng(seed, 0xfac7, static_cast<std::uint64_t>(round));
    FactorRound fr;
    fr.q = coprime[std::uniform_int_distribution<std::size_t>(0, coprime.size() - 1)(rng)];
    ModCycles mc = mod_cycles(n_comp, fr.q);
    SampleBatch b = sample_momentum(mc.spectrum, probe, 1, rng());
    fr.p_e = b.values[0];
    double x = fr.p_e / two_pi;
    x -= std::floor(x);
    std::tie(fr.num, fr.den) = continued_fraction(x, n_comp);
    res.rounds_used = round + 1;
    if (fr.den % 2 != 0) {
      fr.outcome = "odd_order";
    } else {
      const long h = powmod(fr.q, fr.den / 2, n_comp);
      if (h == 1 || h == n_comp - 1) {
        fr.outcome = "trivial_root";
      } else {
        for (long f : {std::gcd(h - 1, n_comp), std::gcd(h + 1, n_comp)}) {
          if (f > 1 && f < n_comp) {
            fr.factor = f;
            break;
          }
        }
        fr.outcome = fr.factor ? "factor" : "trivial_gcd";
      }
    }
    res.transcript.push_back(fr);
    if (fr.factor) {
      res.factor = fr.factor;
      return res;
    }
  }
  return res;
}

}  // namespace photonq
