#pragma once

// photonq command-line front end. run() is kept in a header so the test
// suite can drive it in-process.

#include "photonq/fisher.hpp"
#include "photonq/qfi.hpp"
#include "photonq/qumode.hpp"
#include "photonq/thermo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

namespace photonq::cli {

inline constexpr const char* version = "1.0.0";

enum Exit { ok = 0, config_error = 2, guard_failure = 3, check_failure = 4 };

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Output helpers

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw DomainError("cannot write " + path.string());
    out_.imbue(std::locale::classic());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ",") << v, first = false), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

inline StateKind parse_state(const std::string& s) {
  if (s == "hb") return StateKind::HB;
  if (s == "noon") return StateKind::NOON;
  if (s == "fock") return StateKind::Fock;
  if (s == "pair") return StateKind::SymmetricPair;
  if (s == "yurke-a") return StateKind::YurkeA;
  if (s == "yurke-b") return StateKind::YurkeB;
  throw DomainError("unknown state '" + s + "'");
}

inline const std::vector<std::string> state_names{"hb", "noon", "fock", "pair", "yurke-a", "yurke-b"};

// ---------------------------------------------------------------------------
// Configuration

struct Common {
  std::uint64_t seed = 0;
  std::string out = "out";
  int threads = 0;
  bool check = false;
};

struct FisherMinArgs {
  std::string state = "hb";
  int n = 2, m = 0, grid = 24, iters = 200;
};

struct QfiTableArgs {
  int n_max = 10;
};

struct MleArgs {
  std::string state = "hb";
  int n = 2, m = 0, shots = 100000, reps = 200;
  double psi1 = 0.3, psi2 = 1.2, psi3 = 0.8;
};

struct TraceArgs {
  double s0 = 1.0, delta = 0.05;
  int dim = 16, trials = 200;
  long shots = 0;  // 0: the shot count from the variance bound
};

struct FactorArgs {
  long n = 15;
  double s0 = 1.0, s0tau = 0;  // 0: N^2
  int max_rounds = 100;
};

struct ThermoArgs {
  std::string scenario = "manual";
  double omega = 1, omega_out = 2, r = 0.5, temp = 1;
  int cutoff = 0;
  double epsilon = 1, sigma = 1, k = 1, mass = 1;
  double accel = two_pi, mass_bh = 1, exponent_const = two_pi;
};

// Typed echo of the effective configuration; keys mirror the flag names.
inline void to_json(json& j, const Common& c) {
  j = {{"seed", c.seed}, {"out", c.out}, {"threads", c.threads}, {"check", c.check}};
}
inline void to_json(json& j, const FisherMinArgs& a) {
  j = {{"state", a.state}, {"n", a.n}, {"m", a.m}, {"grid", a.grid}, {"iters", a.iters}};
}
inline void to_json(json& j, const QfiTableArgs& a) { j = {{"n-max", a.n_max}}; }
inline void to_json(json& j, const MleArgs& a) {
  j = {{"state", a.state}, {"n", a.n},         {"m", a.m},         {"shots", a.shots},
       {"reps", a.reps},   {"psi1", a.psi1}, {"psi2", a.psi2}, {"psi3", a.psi3}};
}
inline void to_json(json& j, const TraceArgs& a) {
  j = {{"s0", a.s0}, {"delta", a.delta}, {"dim", a.dim}, {"trials", a.trials}, {"shots", a.shots}};
}
inline void to_json(json& j, const FactorArgs& a) {
  j = {{"n", a.n}, {"s0", a.s0}, {"s0tau", a.s0tau}, {"max-rounds", a.max_rounds}};
}
inline void to_json(json& j, const ThermoArgs& a) {
  j = {{"scenario", a.scenario}, {"omega", a.omega},     {"omega-out", a.omega_out}, {"r", a.r},
       {"temp", a.temp},         {"cutoff", a.cutoff},   {"epsilon", a.epsilon},     {"sigma", a.sigma},
       {"k", a.k},               {"mass", a.mass},       {"accel", a.accel},         {"mass-bh", a.mass_bh},
       {"exponent-const", a.exponent_const}};
}

// Reads key=value lines; '#' starts a comment.
inline std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    tokens.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  return tokens;
}

// Splices config-file tokens in front of the user's flags so that flags win.
inline std::vector<std::string> expand_config(std::vector<std::string> args,
                                              const std::vector<std::string>& commands) {
  std::string path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (path.empty()) return kept;
  const auto tokens = config_tokens(path);
  auto at = std::find_first_of(kept.begin(), kept.end(), commands.begin(), commands.end());
  if (at == kept.end()) throw DomainError("--config needs a subcommand");
  kept.insert(at + 1, tokens.begin(), tokens.end());
  return kept;
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the check verdict and fills the manifest config.

struct Outcome {
  bool check_passed = true;
  json summary;
  std::vector<std::string> files;
};

inline Outcome run_fisher_min(const Common& c, const FisherMinArgs& a, const std::filesystem::path& dir) {
  const auto st = named_state(parse_state(a.state), a.n, a.m);
  SearchOptions opt;
  opt.threads = c.threads;
  const auto res = min_trace_search(st, a.grid, a.iters, c.seed, opt);
  CsvWriter land(dir / "landscape.csv", {"psi1_rad", "psi2_rad", "psi3_rad", "trace_inv"});
  for (const auto& p : res.landscape) land.row(p.psi.psi1, p.psi.psi2, p.psi.psi3, p.value);

  Outcome o;
  const double bound = optimal_bound(a.n);
  o.summary = {{"value", res.value},
               {"psi_star", {res.psi_star.psi1, res.psi_star.psi2, res.psi_star.psi3}},
               {"quantum_bound", bound},
               {"ratio_to_bound", res.value / bound}};
  json checks = json::object();
  checks["not_below_quantum_bound"] = res.value >= bound * (1 - 1e-9);
  if (a.state == "hb") checks["hb_value"] = std::abs(res.value - 3.0 / (a.n * (a.n + 2.0))) <= 1e-3;
  for (auto& [k, v] : checks.items()) o.check_passed = o.check_passed && v.get<bool>();
  o.summary["checks"] = checks;
  write_json(dir / "minimum.json", o.summary);
  o.files = {"landscape.csv", "minimum.json"};
  return o;
}

// Expected saturation/optimality verdicts for the named families.
inline std::pair<bool, bool> expected_class(StateKind k, int n, int m) {
  switch (k) {
    case StateKind::Fock: return {2 * m == n, 2 * m == n};
    case StateKind::HB: return {true, true};
    case StateKind::YurkeA: return {true, false};
    case StateKind::YurkeB: return {false, false};
    case StateKind::NOON:
    case StateKind::SymmetricPair: {
      const int lo = std::min(m, n - m);
      const bool sat = 2 * lo != n - 1;
      return {sat, sat && 2 * lo != n - 2};
    }
  }
  return {false, false};
}

inline Outcome run_qfi_table(const QfiTableArgs& a, const std::filesystem::path& dir) {
  if (a.n_max < 2) throw DomainError("qfi-table: --n-max must be >= 2");
  CsvWriter csv(dir / "classification.csv",
                {"kind", "n", "m", "saturates", "optimal", "trace_inv_qfi", "quantum_bound"});
  Outcome o;
  int rows = 0, agree = 0;
  for (int n = 1; n <= a.n_max; ++n) {
    std::vector<std::pair<StateKind, int>> entries{{StateKind::NOON, 0}};
    for (int m = 0; m <= n; ++m) entries.push_back({StateKind::Fock, m});
    for (int m = 0; 2 * m <= n; ++m) entries.push_back({StateKind::SymmetricPair, m});
    if (n % 2 == 0) {
      entries.push_back({StateKind::HB, 0});
      if (n >= 2) entries.push_back({StateKind::YurkeA, 0});
      entries.push_back({StateKind::YurkeB, 0});
    }
    for (auto [kind, m] : entries) {
      const auto st = named_state(kind, n, m);
      const bool sat = saturation_check(st).ok;
      const bool opt = n >= 2 && optimality_check(st).ok;
      const Mat3 qfi = qfi_total(st).entries;
      const double ti = condition_number(qfi) < 1e12 ? trace_inverse(qfi)
                                                     : std::numeric_limits<double>::infinity();
      csv.row(to_string(kind), n, m, sat ? 1 : 0, opt ? 1 : 0, ti, optimal_bound(n));
      auto [esat, eopt] = expected_class(kind, n, m);
      if (n < 2) eopt = false;
      ++rows;
      agree += (sat == esat && opt == eopt) ? 1 : 0;
    }
  }
  o.check_passed = agree == rows;
  o.summary = {{"rows", rows}, {"agreeing_rows", agree}};
  write_json(dir / "classification_summary.json", o.summary);
  o.files = {"classification.csv", "classification_summary.json"};
  return o;
}

inline Outcome run_mle(const Common& c, const MleArgs& a, const std::filesystem::path& dir) {
  const auto st = named_state(parse_state(a.state), a.n, a.m);
  const EulerAngles truth{a.psi1, a.psi2, a.psi3};
  MleOptions opt;
  opt.repetitions = a.reps;
  opt.threads = c.threads;
  const auto res = mle_estimate(st, truth, a.shots, c.seed, opt);
  const double bound = trace_inverse_local(fisher_total(st, truth), truth);
  const double measured = (v_matrix(truth) * res.emp_cov).trace() * a.shots;

  CsvWriter est(dir / "estimates.csv", {"rep", "psi1_rad", "psi2_rad", "psi3_rad"});
  for (std::size_t i = 0; i < res.estimates.size(); ++i)
    est.row(i, res.estimates[i](0), res.estimates[i](1), res.estimates[i](2));

  Outcome o;
  json cov = json::array();
  for (int i = 0; i < 3; ++i) cov.push_back({res.emp_cov(i, 0), res.emp_cov(i, 1), res.emp_cov(i, 2)});
  o.summary = {{"psi_hat", {res.psi_hat.psi1, res.psi_hat.psi2, res.psi_hat.psi3}},
               {"emp_cov", cov},
               {"local_variance_times_shots", measured},
               {"cramer_rao_bound", bound},
               {"ratio", measured / bound},
               {"optimizer_failures", res.failures}};
  o.check_passed = std::abs(measured / bound - 1) <= 0.2 && res.failures == 0;
  write_json(dir / "mle.json", o.summary);
  o.files = {"estimates.csv", "mle.json"};
  return o;
}

inline Outcome run_qumode_trace(const Common& c, const TraceArgs& a, const std::filesystem::path& dir) {
  if (a.dim < 1 || a.trials < 1 || !(a.delta > 0)) throw DomainError("qumode-trace: invalid parameters");
  const long shots = a.shots > 0 ? a.shots : trace_shots_required(a.s0, a.delta);
  const QumodeProbe probe{a.s0, 1.0, 0};
  probe.validate();
  CsvWriter csv(dir / "trials.csv", {"trial", "estimate_re", "estimate_im", "analytic_re", "analytic_im",
                                     "error_modulus", "error_componentwise"});
  int within_mod = 0, within_comp = 0;
  EigenphaseSpectrum first;
  for (int t = 0; t < a.trials; ++t) {
    auto rng = stream_rng(c.seed, 0x7ace, t);
    std::uniform_real_distribution<double> u(0, two_pi);
    std::vector<double> ph(a.dim);
    for (auto& p : ph) p = u(rng);
    const auto spec = EigenphaseSpectrum::from_phases(ph);
    if (t == 0) first = spec;
    const auto est = estimate_trace(spec, probe, shots, rng());
    const cplx err = est.estimate - est.analytic;
    const double comp = std::max(std::abs(err.real()), std::abs(err.imag()));
    within_mod += std::abs(err) <= a.delta;
    within_comp += comp <= a.delta;
    csv.row(t, est.estimate.real(), est.estimate.imag(), est.analytic.real(), est.analytic.imag(),
            std::abs(err), comp);
  }

  // histogram of the first trial's samples against the density
  const auto batch = sample_momentum(first, probe, shots, c.seed);
  const auto pdf = momentum_pdf(first, probe);
  const int bins = 64;
  const double lo = -2.0, hi = two_pi + 2.0, width = (hi - lo) / bins;
  std::vector<long> counts(bins, 0);
  for (double v : batch.values)
    if (v >= lo && v < hi) ++counts[static_cast<int>((v - lo) / width)];
  CsvWriter hist(dir / "histogram.csv", {"bin_center", "empirical_density", "density"});
  for (int b = 0; b < bins; ++b) {
    const double x = lo + (b + 0.5) * width;
    hist.row(x, counts[b] / (double(shots) * width), pdf(x));
  }

  Outcome o;
  const double frac_mod = double(within_mod) / a.trials, frac_comp = double(within_comp) / a.trials;
  o.summary = {{"shots", shots},
               {"shot_factor", trace_shot_factor(a.s0)},
               {"bias_factor", std::exp(-1.0 / (4 * a.s0 * a.s0))},
               {"fraction_within_delta_componentwise", frac_comp},
               {"fraction_within_delta_modulus", frac_mod},
               {"target_fraction", 0.9}};
  o.check_passed = frac_comp >= 0.9;
  write_json(dir / "trace_summary.json", o.summary);
  o.files = {"trials.csv", "histogram.csv", "trace_summary.json"};
  return o;
}

inline Outcome run_qumode_factor(const Common& c, const FactorArgs& a, const std::filesystem::path& dir) {
  const double s0tau = a.s0tau > 0 ? a.s0tau : double(a.n) * a.n;
  const QumodeProbe probe{a.s0, s0tau / a.s0, 0};
  const auto res = factor(a.n, probe, c.seed, a.max_rounds);
  json rounds = json::array();
  for (const auto& r : res.transcript)
    rounds.push_back({{"q", r.q}, {"p_e", r.p_e}, {"num", r.num}, {"den", r.den}, {"outcome", r.outcome},
                      {"factor", r.factor}});
  Outcome o;
  o.summary = {{"n", a.n},
               {"s0tau", s0tau},
               {"factor", res.factor ? json(*res.factor) : json(nullptr)},
               {"rounds_used", res.rounds_used},
               {"classical", res.classical},
               {"rounds_bound", factor_rounds_bound(a.n, s0tau)},
               {"transcript", rounds}};
  o.check_passed = res.factor && *res.factor > 1 && *res.factor < a.n && a.n % *res.factor == 0;
  write_json(dir / "transcript.json", o.summary);
  o.files = {"transcript.json"};
  return o;
}

inline SqueezeQuench thermo_quench(const ThermoArgs& a, json& scenario) {
  SqueezeQuench q{a.omega, a.omega_out, a.r, a.temp, a.cutoff};
  if (a.scenario == "cosmology") {
    const auto s = r_from_cosmology({a.epsilon, a.sigma, a.k, a.mass});
    q.omega_in = s.omega_in, q.omega_out = s.omega_out, q.r = s.r;
    scenario = {{"omega_in", s.omega_in}, {"omega_out", s.omega_out}, {"r", s.r}};
  } else if (a.scenario == "unruh" || a.scenario == "blackhole") {
    const auto s = a.scenario == "unruh" ? r_from_unruh(a.accel, a.omega, a.exponent_const)
                                         : r_from_blackhole(a.mass_bh, a.omega, a.exponent_const);
    q.omega_in = q.omega_out = a.omega;
    q.r = s.r;
    scenario = {{"omega", a.omega}, {"r", s.r}, {"horizon_temperature", s.temperature},
                {"mode_occupation", std::pow(std::sinh(s.r), 2)}};
  } else if (a.scenario != "manual") {
    throw DomainError("unknown scenario '" + a.scenario + "'");
  }
  q.validate();
  return q;
}

inline Outcome run_thermo_report(const ThermoArgs& a, const std::filesystem::path& dir) {
  json scenario = json::object();
  const SqueezeQuench q = thermo_quench(a, scenario);
  const SqueezeTable table = table_for(q);
  const WorkMoments m = work_moments(q, table, std::numeric_limits<double>::infinity());
  const EntropyPair e = entropy_distributions(q, table);
  const FluctuationReport rep = fluctuation_report(q);

  const WorkPair w = work_distribution(q);
  CsvWriter wf(dir / "work_forward.csv", {"work", "probability"});
  for (const auto& at : w.forward.atoms) wf.row(at.value, at.p);
  CsvWriter wr(dir / "work_reverse.csv", {"work", "probability"});
  for (const auto& at : w.reverse.atoms) wr.row(at.value, at.p);

  std::map<long, double> pc;
  for (const auto& at : e.contraction.atoms) pc[std::lround(at.value * 1e9)] += at.p;
  CsvWriter ent(dir / "entropy.csv", {"s", "p_expansion", "p_contraction_at_minus_s", "exp_s_times_p_contraction"});
  for (const auto& at : e.expansion.atoms) {
    auto it = pc.find(std::lround(-at.value * 1e9));
    const double c = it == pc.end() ? 0.0 : it->second;
    ent.row(at.value, at.p, c, std::exp(at.value) * c);
  }

  const double ncr_closed = created_quanta(q);
  json checks = {
      {"jarzynski", std::abs(rep.mean_exp_minus_s - 1) <= 1e-6},
      {"crooks_pointwise", rep.crooks_violation <= 1e-8},
      {"entropy_equals_friction", std::abs(rep.avg_s - rep.w_fric_over_t) <= 1e-6},
      {"entropy_equals_created_quanta", std::abs(rep.avg_s - rep.n_cr_identity) <= 1e-6},
      {"created_quanta_closed_form", std::abs(m.n_created - ncr_closed) <= 1e-8},
      {"relative_entropy", std::abs(rep.temp_out * rep.rel_entropy - rep.w_fric) <= 1e-5},
      {"friction_nonnegative", rep.w_fric >= -1e-12},
      {"work_normalized", std::abs(w.forward.total() - 1) <= 1e-8 && std::abs(w.reverse.total() - 1) <= 1e-8}};
  Outcome o;
  for (auto& [k, v] : checks.items()) o.check_passed = o.check_passed && v.get<bool>();
  o.summary = {{"scenario", a.scenario},
               {"derived", scenario},
               {"cutoff", rep.cutoff},
               {"temp_out", rep.temp_out},
               {"avg_w", m.avg_w},
               {"avg_w_ad", m.avg_w_ad},
               {"w_fric", rep.w_fric},
               {"n_created", m.n_created},
               {"n_created_closed_form", ncr_closed},
               {"avg_s", rep.avg_s},
               {"w_fric_over_temp_out", rep.w_fric_over_t},
               {"omega_n_created_over_temp", rep.n_cr_identity},
               {"relative_entropy", rep.rel_entropy},
               {"mean_exp_minus_s", rep.mean_exp_minus_s},
               {"crooks_violation", rep.crooks_violation},
               {"checks", checks}};
  write_json(dir / "identities.json", o.summary);
  o.files = {"work_forward.csv", "work_reverse.csv", "entropy.csv", "identities.json"};
  return o;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"photonq: Fisher information, qumode statistics and squeezing thermodynamics"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", version);

  Common common;
  FisherMinArgs fm;
  QfiTableArgs qt;
  MleArgs ml;
  TraceArgs tr;
  FactorArgs fa;
  ThermoArgs th;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--seed", common.seed, "master seed");
    s->add_option("--out", common.out, "output directory");
    s->add_option("--threads", common.threads, "worker threads (0: PHOTONQ_THREADS or 1)")->check(CLI::NonNegativeNumber);
    s->add_flag("--check", common.check, "exit 4 when the run's acceptance checks fail");
  };

  auto* s_fm = app.add_subcommand("fisher-min", "global minimum of the local-parameter variance");
  add_common(s_fm);
  s_fm->add_option("--state", fm.state)->check(CLI::IsMember(state_names));
  s_fm->add_option("--n", fm.n, "photon number")->check(CLI::PositiveNumber);
  s_fm->add_option("--m", fm.m, "mode-a photons for fock/pair states")->check(CLI::NonNegativeNumber);
  s_fm->add_option("--grid", fm.grid, "grid points per angle");
  s_fm->add_option("--iters", fm.iters, "simplex iterations per restart")->check(CLI::PositiveNumber);

  auto* s_qt = app.add_subcommand("qfi-table", "saturation and optimality classification");
  add_common(s_qt);
  s_qt->add_option("--n-max", qt.n_max, "largest photon number");

  auto* s_ml = app.add_subcommand("mle", "maximum-likelihood estimation against the Cramer-Rao bound");
  add_common(s_ml);
  s_ml->add_option("--state", ml.state)->check(CLI::IsMember(state_names));
  s_ml->add_option("--n", ml.n)->check(CLI::PositiveNumber);
  s_ml->add_option("--m", ml.m)->check(CLI::NonNegativeNumber);
  s_ml->add_option("--psi1", ml.psi1);
  s_ml->add_option("--psi2", ml.psi2);
  s_ml->add_option("--psi3", ml.psi3);
  s_ml->add_option("--shots", ml.shots, "shots per basis");
  s_ml->add_option("--reps", ml.reps, "repetitions")->check(CLI::Range(2, 1000000));

  auto* s_tr = app.add_subcommand("qumode-trace", "normalized-trace estimation trials");
  add_common(s_tr);
  s_tr->add_option("--s0", tr.s0, "squeezing factor");
  s_tr->add_option("--delta", tr.delta, "target accuracy");
  s_tr->add_option("--dim", tr.dim, "register dimension");
  s_tr->add_option("--trials", tr.trials);
  s_tr->add_option("--shots", tr.shots, "shots per trial (0: from the variance bound)");

  auto* s_fa = app.add_subcommand("qumode-factor", "order-finding factorization");
  add_common(s_fa);
  s_fa->add_option("--n", fa.n, "number to factor");
  s_fa->add_option("--s0", fa.s0, "squeezing factor");
  s_fa->add_option("--s0tau", fa.s0tau, "s0 tau (0: N^2)");
  s_fa->add_option("--max-rounds", fa.max_rounds)->check(CLI::NonNegativeNumber);

  auto* s_th = app.add_subcommand("thermo-report", "work and entropy statistics of a squeezing quench");
  add_common(s_th);
  s_th->add_option("--scenario", th.scenario)->check(CLI::IsMember({"manual", "cosmology", "unruh", "blackhole"}));
  s_th->add_option("--omega", th.omega, "initial frequency");
  s_th->add_option("--omega-out", th.omega_out, "final frequency");
  s_th->add_option("--r", th.r, "squeezing parameter");
  s_th->add_option("--temp", th.temp, "initial temperature");
  s_th->add_option("--cutoff", th.cutoff, "photons per mode (0: automatic)");
  s_th->add_option("--epsilon", th.epsilon);
  s_th->add_option("--sigma", th.sigma);
  s_th->add_option("--k", th.k);
  s_th->add_option("--mass", th.mass);
  s_th->add_option("--accel", th.accel);
  s_th->add_option("--mass-bh", th.mass_bh);
  s_th->add_option("--exponent-const", th.exponent_const, "c in tanh r = exp(-c omega / a)");

  std::vector<std::string> commands;
  for (auto* s : app.get_subcommands({})) commands.push_back(s->get_name());

  try {
    args = expand_config(std::move(args), commands);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion& e) {
    out << version << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  json config = common;
  json specific;
  if (name == "fisher-min") specific = fm;
  if (name == "qfi-table") specific = qt;
  if (name == "mle") specific = ml;
  if (name == "qumode-trace") specific = tr;
  if (name == "qumode-factor") specific = fa;
  if (name == "thermo-report") specific = th;
  config.update(specific);

  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  Outcome result;
  try {
    const fs::path dir(common.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DomainError("cannot create output directory " + common.out);
    if (name == "fisher-min") result = run_fisher_min(common, fm, dir);
    if (name == "qfi-table") result = run_qfi_table(qt, dir);
    if (name == "mle") result = run_mle(common, ml, dir);
    if (name == "qumode-trace") result = run_qumode_trace(common, tr, dir);
    if (name == "qumode-factor") result = run_qumode_factor(common, fa, dir);
    if (name == "thermo-report") result = run_thermo_report(th, dir);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"subcommand", name},
                     {"seed", common.seed},
                     {"config", config},
                     {"versions", {{"photonq", version},
                                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                 std::to_string(EIGEN_MINOR_VERSION)},
                                   {"compiler", __VERSION__}}},
                     {"outputs", result.files},
                     {"checks_passed", result.check_passed},
                     {"timing", {{"wall_seconds", wall}}}};
    write_json(dir / "manifest.json", manifest);
    out << result.summary.dump(2) << '\n';
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const NumericalGuard& e) {
    err << "numerical guard: " << e.what() << '\n';
    return guard_failure;
  }
  if (common.check && !result.check_passed) {
    err << "check failed\n";
    return check_failure;
  }
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace photonq::cli
