// ioncool command-line front end.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "ioncool/config.hpp"
#include "ioncool/optimize.hpp"

namespace fs = std::filesystem;
using namespace ioncool;

namespace {

struct Options {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  int threads = -1;
  std::string format = "csv";
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Lazily derived physics objects shared by the subcommands.
class Context {
 public:
  explicit Context(RunConfig cfg) : cfg_(std::move(cfg)) {
    norm_ = normalization_for_mass_u(cfg_.number("mass_u"));
  }

  const RunConfig& cfg() const { return cfg_; }
  const Normalization& norm() const { return norm_; }

  double gamma() const {
    if (auto g = cfg_.number_or_auto("damping.gamma")) {
      if (!(*g >= 0.0)) throw ConfigError("config: 'damping.gamma' must be >= 0");
      return *g;
    }
    return gamma_for_rabi_khz(cfg_.number("damping.rabi_khz"));
  }

  CoolingMethod method() const { return cooling_method_from_string(cfg_.string("damping.method")); }

  HeatingModel base_heating() const {
    HeatingModel m;
    m.alpha = cfg_.number("heating.alpha");
    m.A0 = cfg_.number("heating.A0");
    m.B0 = cfg_.number("heating.B0");
    const std::string s = cfg_.string("heating.scaling");
    if (s == "per_ion") {
      m.scaling = HeatingScaling::per_ion;
    } else if (s == "fixed") {
      m.scaling = HeatingScaling::fixed;
    } else {
      throw ConfigError("config: 'heating.scaling' must be per_ion or fixed");
    }
    m.D = 1.0;
    validate(m);
    return m;
  }

  IonChain reference_chain() const {
    const TrapPotential pot{cfg_.number("reference.x2"), cfg_.number("reference.x4")};
    const int n = cfg_.integer("reference.n_ions");
    return make_chain(pot, solve_equilibrium(pot, n),
                      labels_to_indices(cfg_.integers("reference.coolant_labels"), n));
  }

  double calibrated_D() const {
    return calibrate_D(base_heating(), reference_chain(),
                       gamma_for_rabi_khz(cfg_.number("reference.rabi_khz")),
                       cfg_.number("reference.n0"),
                       cooling_method_from_string(cfg_.string("reference.method")));
  }

  HeatingModel heating() const {
    if (!heating_) {
      HeatingModel m = base_heating();
      if (auto d = cfg_.number_or_auto("heating.D")) {
        m.D = *d;
        d_source_ = "config";
      } else {
        m.D = calibrated_D();
        d_source_ = "calibrated";
      }
      validate(m);
      heating_ = m;
    }
    return *heating_;
  }
  std::string d_source() const {
    heating();
    return d_source_;
  }

  static std::vector<int> labels_to_indices(const std::vector<int>& labels, int n) {
    std::vector<int> out;
    for (int l : labels) out.push_back(index_from_label(l, n));
    return out;
  }

  IonChain explicit_chain() const {
    const int n = cfg_.integer("chain.n_ions");
    const std::string kind = cfg_.string("chain.potential");
    TrapPotential pot;
    if (kind == "explicit") {
      pot = {cfg_.number("trap.x2"), cfg_.number("trap.x4")};
    } else if (kind == "equispaced") {
      pot = calibrate_equispacing(n, cfg_.number("chain.spacing_um") * 1e-6, norm_).potential;
    } else {
      throw ConfigError("config: 'chain.potential' must be explicit or equispaced");
    }
    return make_chain(pot, solve_equilibrium(pot, n),
                      labels_to_indices(cfg_.integers("chain.coolant_labels"), n),
                      cfg_.integer("chain.n_endcaps"));
  }

  CaseStudy case_study() const {
    CaseStudy cs;
    cs.n_qubits = cfg_.integer("case.n_qubits");
    cs.n_endcaps = cfg_.integer("case.n_endcaps");
    cs.gate_time = cfg_.number("case.gate_time_us") * 1e-6;
    cs.total_gates = cfg_.integer("case.total_gates");
    cs.T2 = cfg_.number("case.T2_s");
    if (cs.n_qubits < 0 || cs.n_endcaps < 0 || !(cs.gate_time > 0.0) || cs.total_gates < 1 ||
        !(cs.T2 > 0.0)) {
      throw ConfigError("config: case parameters must be positive");
    }
    return cs;
  }

  const ChainFactory& factory() const {
    if (!factory_) {
      factory_ = std::make_unique<ChainFactory>(
          chain_family_from_string(cfg_.string("case.family")),
          cfg_.number("case.spacing_um") * 1e-6, norm_,
          TrapPotential{cfg_.number("trap.x2"), cfg_.number("trap.x4")});
    }
    return *factory_;
  }

  IonChain case_chain() const {
    const CaseStudy cs = case_study();
    const int nc = cfg_.integer("case.n_coolants");
    return factory().chain(cs.n_ions(nc), nc, cs.n_endcaps);
  }

  double kappa_for_duty() const {
    const IonChain chain = case_chain();
    const CoolingLimitReport r =
        cooling_limit(chain, heating(), gamma_for_rabi_khz(cfg_.number("fidelity.kappa_rabi_khz")));
    return calibrate_kappa_to_duty(r.h, r.c, case_study(), 1,
                                   cfg_.number("fidelity.kappa_target_duty"));
  }

  double kappa() const {
    if (!kappa_) {
      if (auto k = cfg_.number_or_auto("fidelity.kappa")) {
        kappa_ = *k;
        kappa_source_ = "config";
      } else {
        kappa_ = kappa_for_duty();
        kappa_source_ = "calibrated";
      }
    }
    return *kappa_;
  }
  std::string kappa_source() const {
    kappa();
    return kappa_source_;
  }

 private:
  RunConfig cfg_;
  Normalization norm_;
  mutable std::optional<HeatingModel> heating_;
  mutable std::string d_source_;
  mutable std::unique_ptr<ChainFactory> factory_;
  mutable std::optional<double> kappa_;
  mutable std::string kappa_source_;
};

/// Writes `<study>_<hash>.csv` and `.json`, then prints the headline.
class Output {
 public:
  Output(const Options& opt, const Context& ctx, std::string study)
      : opt_(opt), ctx_(ctx), study_(std::move(study)), hash_(ctx.cfg().hash(study_)) {}

  std::string header() const {
    return "ioncool " + std::string(kToolVersion) + " study=" + study_ + " config_hash=" + hash_;
  }

  fs::path path(std::string_view ext) const {
    return fs::path(opt_.out_dir) / (study_ + "_" + hash_ + std::string(ext));
  }

  void write_table(const Table& t) const {
    std::ofstream os = open(".csv");
    write_csv(os, t, header());
  }

  std::ofstream open(std::string_view ext) const {
    fs::create_directories(opt_.out_dir);
    std::ofstream os(path(ext), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path(ext).string());
    return os;
  }

  void finish(const Json& result, const Json& headline) const {
    Json doc;
    doc["study"] = study_;
    doc["tool_version"] = std::string(kToolVersion);
    doc["config_hash"] = hash_;
    doc["deterministic"] = true;
    doc["config"] = ctx_.cfg().tree;
    doc["result"] = result;
    doc["headline"] = headline;
    std::ofstream os = open(".json");
    os << doc.dump(2) << '\n';

    if (opt_.format == "json") {
      Json out = headline;
      out["csv"] = path(".csv").string();
      out["json"] = path(".json").string();
      std::cout << out.dump() << '\n';
    } else {
      std::cout << "metric,value\n";
      for (auto it = headline.begin(); it != headline.end(); ++it) {
        std::cout << it.key() << ',' << (it->is_string() ? it->get<std::string>() : it->dump())
                  << '\n';
      }
    }
  }

 private:
  const Options& opt_;
  const Context& ctx_;
  std::string study_;
  std::string hash_;
};

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(format_number(v)); }

std::string role(const IonChain& c, int i) {
  auto has = [i](const std::vector<int>& v) { return std::find(v.begin(), v.end(), i) != v.end(); };
  if (has(c.coolants)) return "coolant";
  if (has(c.endcaps)) return "endcap";
  return "qubit";
}

// ------------------------------------------------------------ subcommands

void cmd_equilibrium(const Options& opt, const Context& ctx) {
  Output out(opt, ctx, "equilibrium");
  const IonChain chain = ctx.explicit_chain();
  const Normalization& n = ctx.norm();
  Table t;
  t.columns = {"index", "label", "role", "u", "x_um"};
  for (int i = 0; i < chain.size(); ++i) {
    t.add_row({std::to_string(i), std::to_string(label_from_index(i, chain.size())),
               role(chain, i), format_number(chain.positions(i)),
               format_number(n.to_meters(chain.positions(i)) * 1e6)});
  }
  out.write_table(t);
  const EquispacingFit all = describe_spacing(chain.potential, chain.positions, n, false);
  const EquispacingFit inner = describe_spacing(chain.potential, chain.positions, n, true);
  const Json result = {
      {"n_ions", chain.size()},
      {"x2", chain.potential.x2},
      {"x4", chain.potential.x4},
      {"d0_m", n.d0},
      {"mean_spacing_um", all.mean_spacing * 1e6},
      {"relative_spread", all.relative_spread},
      {"inner_mean_spacing_um", inner.mean_spacing * 1e6},
      {"inner_relative_spread", inner.relative_spread},
      {"extent_um", n.to_meters(chain.positions(chain.size() - 1) - chain.positions(0)) * 1e6},
      {"gradient_residual",
       gradient(chain.potential, chain.positions).cwiseAbs().maxCoeff()}};
  out.finish(result, {{"mean_spacing_um", all.mean_spacing * 1e6}});
}

void cmd_modes(const Options& opt, const Context& ctx) {
  Output out(opt, ctx, "modes");
  const IonChain chain = ctx.explicit_chain();
  const ModeSpectrum s = normal_modes(chain);
  Table t;
  t.columns = {"mode", "frequency_hz", "ion", "label", "participation"};
  for (int m = 0; m < s.size(); ++m) {
    const double f = rate_to_si(s.frequencies(m)) / kTwoPi;
    for (int k = 0; k < s.size(); ++k) {
      t.add_row({std::to_string(m), format_number(f), std::to_string(k),
                 std::to_string(label_from_index(k, s.size())), format_number(s.modes(k, m))});
    }
  }
  out.write_table(t);
  const int com = com_mode_index(s);
  const double f_com = rate_to_si(s.frequencies(com)) / kTwoPi;
  Json freqs = Json::array();
  for (int m = 0; m < s.size(); ++m) freqs.push_back(rate_to_si(s.frequencies(m)) / kTwoPi);
  const Json result = {{"com_index", com},
                       {"com_frequency_hz", f_com},
                       {"com_coolant_participation", participation_sum(s, com, chain.coolants)},
                       {"frequencies_hz", freqs}};
  out.finish(result, {{"com_frequency_hz", f_com}});
}

void cmd_cooling_limit(const Options& opt, const Context& ctx) {
  Output out(opt, ctx, "cooling-limit");
  const IonChain chain = ctx.explicit_chain();
  const HeatingModel heating = ctx.heating();
  const double gamma = ctx.gamma();
  const ModeSpectrum s = normal_modes(chain);
  std::vector<CoolingLimitReport> reports;
  for (CoolingMethod m : {CoolingMethod::exact, CoolingMethod::perturbative,
                          CoolingMethod::linearized}) {
    reports.push_back(cooling_limit(chain, s, heating, gamma, m));
  }
  if (chain.potential.x2 > 0.0) {
    reports.push_back(quadratic_upper_bound(chain.size(), static_cast<int>(chain.coolants.size()),
                                            chain.potential.x2, gamma, heating));
  }
  Table t;
  t.columns = {"method", "com_frequency_hz", "participation", "h_per_s", "c_per_s", "n0",
               "relative_to_exact"};
  for (const auto& r : reports) {
    t.add_row({std::string(to_string(r.method)), format_number(r.omega0 / kTwoPi),
               format_number(r.participation), format_number(r.h), format_number(r.c),
               format_number(r.n0), format_number(r.n0 / reports.front().n0 - 1.0)});
  }
  out.write_table(t);
  const CoolingLimitReport* chosen = &reports.front();
  for (const auto& r : reports) {
    if (r.method == ctx.method()) chosen = &r;
  }
  Json methods = Json::object();
  for (const auto& r : reports) {
    methods[std::string(to_string(r.method))] = {{"n0", r.n0}, {"h", r.h}, {"c", r.c}};
  }
  const Json result = {{"gamma", gamma},
                       {"D", heating.D},
                       {"D_source", ctx.d_source()},
                       {"com_frequency_hz", chosen->omega0 / kTwoPi},
                       {"participation", chosen->participation},
                       {"method", std::string(to_string(chosen->method))},
                       {"n0", chosen->n0},
                       {"methods", methods}};
  out.finish(result, {{"n0", chosen->n0}, {"method", std::string(to_string(chosen->method))}});
}

void cmd_trajectory(const Options& opt, const Context& ctx) {
  Output out(opt, ctx, "trajectory");
  const RunConfig& cfg = ctx.cfg();
  const IonChain chain = ctx.case_chain();
  const HeatingModel heating = ctx.heating();
  const CoolingLimitReport lim = cooling_limit(chain, heating, ctx.gamma(), ctx.method());
  const CaseStudy cs = ctx.case_study();
  const DutyCycleSchedule sched =
      case_schedule(cs, cfg.integer("schedule.gates_per_cycle"),
                    cfg.number("schedule.cooling_us_per_gate") * 1e-6,
                    cfg.number("schedule.radial_factor"));
  EvolveOptions eo;
  eo.fidelity = FidelityModel{cs.T2, ctx.kappa()};
  eo.cooling_subsamples = cfg.integer("schedule.cooling_subsamples");
  const double n_init =
      cfg.number_or_auto("schedule.n_init").value_or(default_initial_n(lim.h, lim.c));
  const Trajectory traj = evolve(n_init, sched, lim.h, lim.c, eo);
  {
    std::ofstream os = out.open(".csv");
    write_trajectory_csv(os, traj, out.header());
  }
  const double mean_f = mean_gate_fidelity(traj);
  const double total_f = total_fidelity(traj);
  const Json result = {{"n_ions", chain.size()},
                       {"n_coolants", chain.coolants.size()},
                       {"n0", lim.n0},
                       {"h_per_s", lim.h},
                       {"c_per_s", lim.c},
                       {"kappa", ctx.kappa()},
                       {"kappa_source", ctx.kappa_source()},
                       {"duty", sched.duty_cycle()},
                       {"axial_duty", sched.axial_duty_cycle()},
                       {"wall_time_s", traj.wall_time},
                       {"gates", traj.gates.size()},
                       {"mean_fidelity", mean_f},
                       {"total_fidelity", total_f}};
  out.finish(result, {{"mean_fidelity", mean_f}, {"total_fidelity", total_f}, {"n0", lim.n0}});
}

void cmd_placement(const Options& opt, const Context& ctx, unsigned threads) {
  Output out(opt, ctx, "placement-scan");
  const RunConfig& cfg = ctx.cfg();
  const IonChain chain = ctx.explicit_chain();
  const double guard = cfg.number("sweep.placement_guard");
  if (!(guard >= 1.0)) throw ConfigError("config: 'sweep.placement_guard' must be >= 1");
  const auto ranked = enumerate_placements(chain, cfg.integer("sweep.placement_n_coolants"),
                                           ctx.heating(), ctx.gamma(), ctx.method(), threads,
                                           static_cast<std::uint64_t>(guard));
  out.write_table(placement_table(ranked));
  auto entry = [](const Placement& p) {
    return Json{{"labels", p.labels}, {"indices", p.coolants}, {"n0", p.n0}, {"c_per_s", p.c}};
  };
  const Json result = {{"configurations", ranked.size()},
                       {"best", entry(ranked.front())},
                       {"worst", entry(ranked.back())},
                       {"D", ctx.heating().D}};
  out.finish(result, {{"configurations", ranked.size()},
                      {"best_n0", ranked.front().n0},
                      {"best_labels", ranked.front().labels}});
}

void cmd_coolant_scan(const Options& opt, const Context& ctx, unsigned threads) {
  Output out(opt, ctx, "coolant-scan");
  const RunConfig& cfg = ctx.cfg();
  CoolantScanSpec spec;
  spec.case_study = ctx.case_study();
  spec.coolant_counts = cfg.integers("sweep.coolant_counts");
  spec.duties = cfg.numbers("sweep.coolant_duties");
  spec.gates_per_cycle = cfg.integer("schedule.gates_per_cycle");
  spec.gamma = ctx.gamma();
  spec.kappa = ctx.kappa();
  spec.method = ctx.method();
  const CoolantScanResult r = sweep_coolant_count(ctx.factory(), ctx.heating(), spec, threads);
  out.write_table(coolant_table(r));
  Json best = Json::array();
  for (const auto& p : r.best_per_duty) {
    best.push_back({{"duty", p.duty},
                    {"n_coolants", p.n_coolants},
                    {"mean_fidelity", p.metrics.mean_fidelity},
                    {"total_fidelity", p.metrics.total_fidelity},
                    {"n0", num(p.n0)}});
  }
  int failed = 0;
  for (const auto& p : r.points) failed += p.ok ? 0 : 1;
  const Json result = {{"family", std::string(to_string(ctx.factory().family()))},
                       {"kappa", spec.kappa},
                       {"D", ctx.heating().D},
                       {"failed_points", failed},
                       {"argmax_per_duty", best}};
  Json head = Json::object();
  if (!r.best_per_duty.empty()) head["argmax_n_coolants"] = r.best_per_duty.front().n_coolants;
  head["failed_points"] = failed;
  out.finish(result, head);
}

Json duty_summary(const DutyScanResult& r) {
  auto entry = [](const DutyPoint& p) {
    return Json{{"gamma", p.gamma},
                {"gates_per_cycle", p.gates_per_cycle},
                {"cooling_us_per_gate", p.cooling_per_gate * 1e6},
                {"duty", p.metrics.duty},
                {"axial_duty", p.metrics.axial_duty},
                {"mean_fidelity", p.metrics.mean_fidelity},
                {"total_fidelity", p.metrics.total_fidelity},
                {"n0", p.n0}};
  };
  Json optima = Json::array();
  for (const auto& p : r.optima) optima.push_back(entry(p));
  Json best = Json::array();
  for (const auto& p : r.best_per_gamma) best.push_back(entry(p));
  return {{"optima", optima}, {"argmax_per_gamma", best}};
}

void cmd_duty_scan(const Options& opt, const Context& ctx, unsigned threads) {
  Output out(opt, ctx, "duty-scan");
  const RunConfig& cfg = ctx.cfg();
  DutyScanSpec spec;
  spec.case_study = ctx.case_study();
  spec.gammas.clear();
  for (double khz : cfg.numbers("sweep.rabi_khz")) spec.gammas.push_back(gamma_for_rabi_khz(khz));
  spec.gates_per_cycle = cfg.integers("sweep.gates_per_cycle");
  spec.cooling_step = cfg.number("sweep.cooling_step_us") * 1e-6;
  spec.cooling_max = cfg.number("sweep.cooling_max_us") * 1e-6;
  spec.kappa = ctx.kappa();
  spec.n_init = cfg.number_or_auto("schedule.n_init");
  const double radial = cfg.number("sweep.radial_factor");
  const IonChain chain = ctx.case_chain();
  const DutyScanResult r =
      radial > 0.0 ? sweep_duty_cycle_with_radial(chain, ctx.heating(), spec, radial, threads)
                   : sweep_duty_cycle(chain, ctx.heating(), spec, threads);
  out.write_table(duty_table(r));
  Json result = duty_summary(r);
  result["kappa"] = spec.kappa;
  result["kappa_source"] = ctx.kappa_source();
  result["D"] = ctx.heating().D;
  result["radial_factor"] = radial;
  Json head = Json::object();
  const auto& khz = cfg.numbers("sweep.rabi_khz");
  for (std::size_t i = 0; i < r.best_per_gamma.size(); ++i) {
    head["axial_duty_" + format_number(khz[i]) + "khz"] = r.best_per_gamma[i].metrics.axial_duty;
  }
  out.finish(result, head);
}

void cmd_freq_fill(const Options& opt, const Context& ctx, unsigned threads) {
  Output out(opt, ctx, "freq-fill-scan");
  const RunConfig& cfg = ctx.cfg();
  FreqFillSpec spec;
  spec.n_ions = cfg.integer("sweep.freq_fill_n_ions");
  spec.com_frequencies_hz.clear();
  for (double khz : cfg.numbers("sweep.freq_fill_khz")) spec.com_frequencies_hz.push_back(khz * 1e3);
  spec.gamma = ctx.gamma();
  spec.method = ctx.method();
  const std::string base_kind = cfg.string("sweep.freq_fill_base");
  TrapPotential base;
  if (base_kind == "equispaced") {
    base = calibrate_equispacing(spec.n_ions, cfg.number("sweep.freq_fill_spacing_um") * 1e-6,
                                 ctx.norm())
               .potential;
  } else if (base_kind == "quadratic") {
    base = {0.5, 0.0};  // rescaled per frequency
  } else {
    throw ConfigError("config: 'sweep.freq_fill_base' must be equispaced or quadratic");
  }
  const auto cells = sweep_frequency_fill(base, ctx.heating(), spec, threads);
  out.write_table(freq_fill_table(cells));
  Json rows = Json::array();
  for (const auto& c : cells) {
    rows.push_back({{"com_frequency_hz", c.com_frequency_hz}, {"fill", c.fill}, {"n0", c.n0}});
  }
  const auto best = std::min_element(cells.begin(), cells.end(),
                                     [](const auto& a, const auto& b) { return a.n0 < b.n0; });
  const Json result = {{"base", base_kind},
                       {"D", ctx.heating().D},
                       {"min_n0", best->n0},
                       {"min_at_frequency_hz", best->com_frequency_hz},
                       {"min_at_fill", best->fill},
                       {"cells", rows}};
  out.finish(result, {{"min_n0", best->n0}});
}

void cmd_calibrate(const Options& opt, const Context& ctx) {
  Output out(opt, ctx, "calibrate");
  const RunConfig& cfg = ctx.cfg();
  const double D = ctx.calibrated_D();
  HeatingModel heating = ctx.base_heating();
  heating.D = D;
  const IonChain ref = ctx.reference_chain();
  const CoolingLimitReport rep =
      cooling_limit(ref, heating, gamma_for_rabi_khz(cfg.number("reference.rabi_khz")),
                    cooling_method_from_string(cfg.string("reference.method")));

  const CaseStudy cs = ctx.case_study();
  const IonChain chain = ctx.case_chain();
  const CoolingLimitReport lim =
      cooling_limit(chain, heating, gamma_for_rabi_khz(cfg.number("fidelity.kappa_rabi_khz")));
  const double k_duty =
      calibrate_kappa_to_duty(lim.h, lim.c, cs, 1, cfg.number("fidelity.kappa_target_duty"));
  const CoolingOptimum at_duty = optimal_cooling_time(lim.h, lim.c, cs, 1, {cs.T2, k_duty});
  const double k_fid = calibrate_kappa_to_fidelity(
      lim.h, lim.c, cs, 1, cfg.number("fidelity.kappa_target_mean_fidelity"));
  const CoolingOptimum at_fid = optimal_cooling_time(lim.h, lim.c, cs, 1, {cs.T2, k_fid});

  Table t;
  t.columns = {"quantity", "value"};
  auto row = [&t](const std::string& k, double v) { t.add_row({k, format_number(v)}); };
  row("D", D);
  row("reference_n0", rep.n0);
  row("reference_com_frequency_hz", rep.omega0 / kTwoPi);
  row("case_n0", lim.n0);
  row("kappa_duty", k_duty);
  row("kappa_duty_cooling_us_per_gate", at_duty.cooling_per_gate * 1e6);
  row("kappa_duty_axial_duty", at_duty.metrics.axial_duty);
  row("kappa_duty_mean_fidelity", at_duty.metrics.mean_fidelity);
  row("kappa_duty_total_fidelity", at_duty.metrics.total_fidelity);
  row("kappa_fidelity", k_fid);
  row("kappa_fidelity_cooling_us_per_gate", at_fid.cooling_per_gate * 1e6);
  row("kappa_fidelity_axial_duty", at_fid.metrics.axial_duty);
  row("kappa_fidelity_mean_fidelity", at_fid.metrics.mean_fidelity);
  row("kappa_fidelity_total_fidelity", at_fid.metrics.total_fidelity);
  out.write_table(t);
  Json result = Json::object();
  for (const auto& r : t.rows) result[r[0]] = std::stod(r[1]);
  out.finish(result, {{"D", D}, {"kappa_duty", k_duty}, {"kappa_fidelity", k_fid}});
}

int fail(std::string_view kind, const std::string& message, int code, Json extra = Json::object()) {
  Json e = {{"kind", std::string(kind)}, {"message", message}, {"exit_code", code}};
  e.update(extra);
  std::cerr << Json{{"error", e}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sympathetic cooling simulation and optimization for trapped-ion chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Options opt;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"equilibrium", "Solve the chain equilibrium"},
      {"modes", "Axial normal modes and participation factors"},
      {"cooling-limit", "COM cooling limit by every method"},
      {"trajectory", "Phonon-number trajectory and gate fidelities"},
      {"placement-scan", "Rank every coolant placement"},
      {"coolant-scan", "Fidelity versus number of coolants"},
      {"duty-scan", "Fidelity over cooling time and gates per cycle"},
      {"freq-fill-scan", "Cooling limit over COM frequency and coolant fill"},
      {"calibrate", "Calibrate the heating normalization D and sensitivity kappa"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", opt.overrides, "Override a config key (key=value)")
        ->allow_extra_args(false);
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--threads", opt.threads, "Worker threads (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", opt.format, "Headline format")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const Context ctx(load_config(opt.config_path, opt.overrides));
    const unsigned threads = resolve_threads(opt.threads);
    if (cmd == "equilibrium") cmd_equilibrium(opt, ctx);
    else if (cmd == "modes") cmd_modes(opt, ctx);
    else if (cmd == "cooling-limit") cmd_cooling_limit(opt, ctx);
    else if (cmd == "trajectory") cmd_trajectory(opt, ctx);
    else if (cmd == "placement-scan") cmd_placement(opt, ctx, threads);
    else if (cmd == "coolant-scan") cmd_coolant_scan(opt, ctx, threads);
    else if (cmd == "duty-scan") cmd_duty_scan(opt, ctx, threads);
    else if (cmd == "freq-fill-scan") cmd_freq_fill(opt, ctx, threads);
    else if (cmd == "calibrate") cmd_calibrate(opt, ctx);
  } catch (const ConfigError& e) {
    return fail("schema", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), 2);
  } catch (const ConvergenceError& e) {
    return fail("convergence", e.what(), 3, {{"residual", e.residual()}});
  } catch (const GuardExceeded& e) {
    return fail("guard", e.what(), 4, {{"count", e.count()}});
  } catch (const Error& e) {
    return fail("numeric", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("io", e.what(), 1);
  }
  return 0;
}
