// Acceptance checks. Usage: acceptance [criterion ...]; no argument runs all.
// Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ioncool/optimize.hpp"

#ifndef IONCOOL_CLI_PATH
#error "IONCOOL_CLI_PATH must point at the CLI executable"
#endif

using namespace ioncool;

namespace {

constexpr double kGamma640 = 5.328e-5;
const TrapPotential kQuartic15{0.00188, 0.00177};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 6) { return format_significant(v, digits); }

// Shared, calibrated fixtures. Built on first use.
struct Fixtures {
  Normalization norm = normalization_for_mass_u(171.0);
  CaseStudy cs;

  IonChain reference_chain() const {
    return make_chain(kQuartic15, solve_equilibrium(kQuartic15, 15),
                      {index_from_label(-1, 15), index_from_label(0, 15)});
  }

  const HeatingModel& heating() {
    if (!heating_) {
      HeatingModel m;
      m.D = calibrate_D(m, reference_chain(), kGamma640, 29.0);
      heating_ = m;
    }
    return *heating_;
  }

  const ChainFactory& factory() {
    if (!factory_) factory_.emplace(ChainFamily::equispaced, 4.4e-6, norm);
    return *factory_;
  }

  const IonChain& case_chain() {
    if (!case_chain_) case_chain_ = factory().chain(cs.n_ions(6), 6, cs.n_endcaps);
    return *case_chain_;
  }

  double kappa() {
    if (!kappa_) {
      const CoolingLimitReport r = cooling_limit(case_chain(), heating(), kGamma640);
      kappa_ = calibrate_kappa_to_duty(r.h, r.c, cs, 1, 0.6841);
    }
    return *kappa_;
  }

  const DutyScanResult& duty_scan() {
    if (!duty_) {
      DutyScanSpec spec;
      spec.case_study = cs;
      spec.kappa = kappa();
      duty_ = sweep_duty_cycle(case_chain(), heating(), spec, 0);
    }
    return *duty_;
  }

 private:
  std::optional<HeatingModel> heating_;
  std::optional<ChainFactory> factory_;
  std::optional<IonChain> case_chain_;
  std::optional<double> kappa_;
  std::optional<DutyScanResult> duty_;
};

Fixtures& fixtures() {
  static Fixtures f;
  return f;
}

// ---------------------------------------------------------------- criteria

Outcome criterion_1() {
  Outcome o;
  Timer timer;
  const Normalization norm = normalization_for_mass_u(171.0);
  const Eigen::VectorXd u = solve_equilibrium(kQuartic15, 15);
  const double mean_um = spacings(u).mean() * norm.d0 * 1e6;
  const double elapsed = timer.seconds();
  o.detail << "mean spacing " << fmt(mean_um) << " um (target 4.4 +/- 5%), " << fmt(elapsed, 3)
           << " s";
  o.require(std::abs(mean_um - 4.4) <= 0.05 * 4.4, "mean spacing within 5% of 4.4 um");
  o.require(elapsed < 1.0, "runtime < 1 s");

  // Analysis: which normalization length would make these coefficients give 4.4 um,
  // and which coefficients give 4.4 um with the standard length.
  const double d0_needed = 4.4e-6 / spacings(u).mean();
  o.notes.push_back("analysis: d0 = " + fmt(norm.d0 * 1e6) + " um from e^2/(4 pi eps0 m w^2) at " +
                    "2 pi x 1 MHz and 171 u; 4.4 um would need d0 = " + fmt(d0_needed * 1e6) +
                    " um (ratio " + fmt(d0_needed / norm.d0, 4) + ")");
  const EquispacingFit fit = calibrate_equispacing(15, 4.4e-6, norm);
  o.notes.push_back("analysis: coefficients that equispace 15 ions at 4.4 um: x2 = " +
                    fmt(fit.potential.x2) + ", x4 = " + fmt(fit.potential.x4) +
                    " (mean spacing " + fmt(fit.mean_spacing * 1e6) + " um)");
  return o;
}

Outcome criterion_2() {
  Outcome o;
  double worst = 0.0;
  for (int n : {5, 15, 31}) {
    const IonChain chain = centered_chain(TrapPotential{0.01, 0.0}, n, 1);
    const ModeSpectrum s = normal_modes(chain);
    const int com = com_mode_index(s);
    for (int k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(s.modes(k, com) - 1.0 / std::sqrt(double(n))));
    }
  }
  o.detail << "max |v_0k - N^-1/2| = " << fmt(worst, 3) << " over N in {5, 15, 31}";
  o.require(worst <= 1e-10, "COM participation equals N^-1/2 to 1e-10");
  return o;
}

Outcome criterion_3() {
  Outcome o;
  Timer timer;
  const IonChain chain = centered_chain(kQuartic15, 15, 2);
  const std::vector<double> gammas = log_grid(1e-6, 1e-3, 31);
  const auto rows = perturbation_error_scan(chain, gammas);
  double worst = 0.0, at = 0.0;
  for (const auto& r : rows) {
    if (r.relative_error >= worst) {
      worst = r.relative_error;
      at = r.gamma;
    }
  }
  const double elapsed = timer.seconds();
  o.detail << "max relative error " << fmt(worst, 3) << " at gamma " << fmt(at, 3) << " over "
           << rows.size() << " points, " << fmt(elapsed, 3) << " s";
  o.require(worst < 2.5e-4, "relative error < 2.5e-4");
  o.require(elapsed < 10.0, "runtime < 10 s");
  return o;
}

Outcome criterion_4() {
  Outcome o;
  std::mt19937_64 rng(20241019);
  std::uniform_int_distribution<int> size(2, 20);
  std::uniform_real_distribution<double> x2(0.002, 0.02), x4(0.0, 0.003), unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = size(rng);
    const TrapPotential pot{x2(rng), x4(rng)};
    std::vector<int> coolants;
    for (int i = 0; i < n; ++i) {
      if (unit(rng) < 0.4) coolants.push_back(i);
    }
    if (coolants.empty()) coolants.push_back(static_cast<int>(unit(rng) * n));
    const double gamma = std::pow(10.0, -6.0 + 4.0 * unit(rng));
    const IonChain chain = make_chain(pot, solve_equilibrium(pot, n), coolants);
    const DampedSpectrum d =
        exact_damped_modes(-hessian(pot, chain.positions), {gamma, chain.coolants});
    const double trace = d.eigenvalues.real().sum();
    worst = std::max(worst, std::abs(trace + gamma * static_cast<double>(coolants.size())));
  }
  o.detail << "max |sum 2 Re z + gamma |C|| = " << fmt(worst, 3) << " over 50 random chains";
  o.require(worst <= 1e-8, "trace identity to 1e-8");
  return o;
}

Outcome criterion_5() {
  Outcome o;
  Timer timer;
  Fixtures& f = fixtures();
  const IonChain chain = f.reference_chain();
  const auto ranked = enumerate_placements(chain, 2, f.heating(), kGamma640);
  const double elapsed = timer.seconds();
  auto labels = [](const Placement& p) {
    std::string s = "{";
    for (std::size_t i = 0; i < p.labels.size(); ++i) s += (i ? "," : "") + std::to_string(p.labels[i]);
    return s + "}";
  };
  o.detail << ranked.size() << " configurations; best " << labels(ranked[0]) << " "
           << labels(ranked[1]) << " n0 = " << fmt(ranked[0].n0) << "; worst "
           << labels(ranked.back()) << " n0 = " << fmt(ranked.back().n0) << "; "
           << fmt(elapsed, 3) << " s";
  using L = std::vector<int>;
  const std::vector<L> top{ranked[0].labels, ranked[1].labels};
  o.require(ranked.size() == 105, "105 configurations");
  o.require(std::find(top.begin(), top.end(), L{-1, 0}) != top.end() &&
                std::find(top.begin(), top.end(), L{0, 1}) != top.end(),
            "{-1,0} and {0,1} rank first");
  const std::size_t m = ranked.size();
  o.require(ranked[m - 1].labels == L{-7, 7}, "outermost pair ranks last");
  for (std::size_t i = m - 3; i < m; ++i) {
    const L& l = ranked[i].labels;
    o.require(std::abs(l.front()) == 7 || std::abs(l.back()) == 7, "edge pairs fill the bottom three");
  }
  o.require(std::abs(ranked[0].n0 - 29.0) <= 1.0, "best n0 = 29 +/- 1");
  o.require(elapsed < 30.0, "runtime < 30 s");
  return o;
}

struct DutyTarget {
  double gamma;
  double rabi_khz;
  double duty;
  double us_per_gate;
};
const DutyTarget kDutyTargets[] = {
    {1.387e-5, 180, 0.8814, 1673},
    {3.468e-5, 275, 0.7631, 724},
    {5.328e-5, 640, 0.6841, 487},
};

const DutyPoint& best_for(const DutyScanResult& r, double gamma) {
  for (const auto& p : r.best_per_gamma) {
    if (p.gamma == gamma) return p;
  }
  throw DomainError("gamma not scanned");
}

// Duty change of one cooling-grid step at the given point.
double duty_step(const DutyPoint& p, double step, double gate_time) {
  const double t = p.cooling_per_gate;
  return (t + step) / (t + step + gate_time) - t / (t + gate_time);
}

Outcome criterion_6() {
  Outcome o;
  Timer timer;
  Fixtures& f = fixtures();
  const DutyScanResult& r = f.duty_scan();
  const double elapsed = timer.seconds();
  o.detail << "kappa " << fmt(f.kappa()) << ";";
  for (const auto& t : kDutyTargets) {
    const DutyPoint& p = best_for(r, t.gamma);
    const double tol = 0.03 + duty_step(p, 25e-6, f.cs.gate_time);
    o.detail << " " << t.rabi_khz << " kHz: duty " << fmt(p.metrics.axial_duty, 4) << " ("
             << fmt(p.cooling_per_gate * 1e6, 4) << " us/gate, " << p.gates_per_cycle
             << " gate/cycle) vs " << t.duty << " (" << t.us_per_gate << " us);";
    o.require(std::abs(p.metrics.axial_duty - t.duty) <= tol,
              std::to_string(int(t.rabi_khz)) + " kHz duty within tolerance");
    o.require(p.gates_per_cycle == 1, std::to_string(int(t.rabi_khz)) + " kHz at 1 gate/cycle");
  }
  o.detail << " " << fmt(elapsed, 3) << " s";
  o.require(elapsed < 300.0, "runtime < 5 min");
  return o;
}

Outcome criterion_7() {
  Outcome o;
  Fixtures& f = fixtures();
  const DutyPoint& p = best_for(f.duty_scan(), kGamma640);
  o.detail << "640 kHz optimum: <F> = " << fmt(p.metrics.mean_fidelity) << " (target 0.9993 +/- "
           << "0.0002), F_total = " << fmt(p.metrics.total_fidelity, 4)
           << " (target 0.73 +/- 0.03)";
  o.require(std::abs(p.metrics.mean_fidelity - 0.9993) <= 0.0002, "<F> = 0.9993 +/- 0.0002");
  o.require(std::abs(p.metrics.total_fidelity - 0.73) <= 0.03, "F_total = 0.73 +/- 0.03");

  // Analysis: the dephasing factor alone bounds every gate's fidelity.
  const double wall = f.cs.gate_time + cooling_for_duty(0.6841, f.cs.gate_time);
  const double floor = std::exp(-wall / f.cs.T2);
  o.notes.push_back("analysis: at 68.41% duty each gate is charged " + fmt(wall * 1e6, 4) +
                    " us of wall time, so F <= exp(-t/T2) = " + fmt(floor) +
                    " even with no motional error, below 0.9991");
  const double t_max = -std::log(0.9991) * f.cs.T2 - f.cs.gate_time;
  o.notes.push_back("analysis: <F> >= 0.9991 needs <= " + fmt(t_max * 1e6, 4) +
                    " us of cooling per gate (duty <= " +
                    fmt(t_max / (t_max + f.cs.gate_time), 4) +
                    "), incompatible with the calibrated duty optimum");
  o.notes.push_back("analysis: 0.9993^500 = " + fmt(std::pow(0.9993, 500), 4) +
                    "; F_total follows <F> and misses for the same reason");
  return o;
}

Outcome criterion_8() {
  Outcome o;
  Fixtures& f = fixtures();
  CoolantScanSpec spec;
  spec.case_study = f.cs;
  spec.kappa = f.kappa();
  const CoolantScanResult r = sweep_coolant_count(f.factory(), f.heating(), spec, 0);
  const std::size_t nk = spec.coolant_counts.size();
  for (std::size_t d = 0; d < spec.duties.size(); ++d) {
    std::vector<double> fid;
    for (std::size_t k = 0; k < nk; ++k) {
      const CoolantPoint& p = r.points[d * nk + k];
      o.require(p.ok, "all coolant counts evaluated");
      fid.push_back(p.metrics.mean_fidelity);
    }
    const auto arg = static_cast<std::size_t>(std::max_element(fid.begin(), fid.end()) - fid.begin());
    bool unimodal = true;
    for (std::size_t k = 1; k < nk; ++k) {
      if (k <= arg && !(fid[k] > fid[k - 1])) unimodal = false;
      if (k > arg && !(fid[k] < fid[k - 1])) unimodal = false;
    }
    const int best = spec.coolant_counts[arg];
    o.detail << (d ? "; " : "") << "duty " << spec.duties[d] << ": argmax N_C = " << best
             << (unimodal ? " (unimodal)" : " (not unimodal)");
    o.require(unimodal, "unimodal at duty " + fmt(spec.duties[d], 4));
    o.require(arg > 0 && arg + 1 < nk, "interior argmax at duty " + fmt(spec.duties[d], 4));
    o.require(best <= 6, "argmax <= 6 at duty " + fmt(spec.duties[d], 4));
  }
  return o;
}

Outcome criterion_9() {
  Outcome o;
  Timer timer;
  Fixtures& f = fixtures();
  FreqFillSpec spec;
  spec.n_ions = 21;
  spec.gamma = kGamma640;
  const auto cells = sweep_frequency_fill(f.factory().potential(21), f.heating(), spec, 0);
  const double elapsed = timer.seconds();
  const std::size_t nk = static_cast<std::size_t>(spec.n_ions);
  const std::size_t nf = spec.com_frequencies_hz.size();
  bool decreasing = true;
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t fi = 1; fi < nf; ++fi) {
      if (!(cells[fi * nk + k].n0 < cells[(fi - 1) * nk + k].n0)) decreasing = false;
    }
  }
  double plateau = 0.0;
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const double a = cells[fi * nk + nk - 2].n0, b = cells[fi * nk + nk - 1].n0;
    plateau = std::max(plateau, std::abs(b - a) / a);
  }
  o.detail << "n0 " << (decreasing ? "strictly decreasing" : "not strictly decreasing")
           << " in frequency at every fill; largest change between the two highest fills "
           << fmt(plateau * 100, 3) << "%; " << fmt(elapsed, 3) << " s";
  o.require(decreasing, "n0 strictly decreasing in COM frequency");
  o.require(plateau < 0.10, "plateau change < 10%");
  o.require(elapsed < 120.0, "runtime < 2 min");
  return o;
}

Outcome criterion_10() {
  Outcome o;
  Fixtures& f = fixtures();
  DutyScanSpec spec;
  spec.case_study = f.cs;
  spec.kappa = f.kappa();
  const DutyScanResult radial = sweep_duty_cycle_with_radial(f.case_chain(), f.heating(), spec, 1.0, 0);
  const DutyScanResult& plain = f.duty_scan();
  for (const auto& t : kDutyTargets) {
    const DutyPoint& r = best_for(radial, t.gamma);
    const DutyPoint& p = best_for(plain, t.gamma);
    o.detail << t.rabi_khz << " kHz: " << fmt(r.metrics.axial_duty, 4) << " vs "
             << fmt(p.metrics.axial_duty, 4) << " (" << r.gates_per_cycle << " gate/cycle); ";
    const std::string tag = std::to_string(int(t.rabi_khz)) + " kHz";
    o.require(r.gates_per_cycle == 1, tag + " radial optimum at 1 gate/cycle");
    o.require(r.metrics.axial_duty < p.metrics.axial_duty, tag + " duty below no-radial optimum");
  }
  const double d640 = best_for(radial, kGamma640).metrics.axial_duty;
  o.detail << "640 kHz target 0.6554 +/- 0.05";
  o.require(std::abs(d640 - 0.6554) <= 0.05, "640 kHz within 5 duty points of 65.54%");
  return o;
}

Outcome criterion_11() {
  Outcome o;
  Fixtures& f = fixtures();
  const CoolingLimitReport lim = cooling_limit(f.case_chain(), f.heating(), kGamma640);
  double worst_fixed = 0.0;
  for (double n_init : {0.0, lim.n0, 10.0 * lim.n0}) {
    DutyCycleSchedule s;
    s.gates_per_cycle = 1;
    s.cooling_time_per_cycle = 20.0 / lim.c;
    s.total_gates = 3;
    const Trajectory t = evolve(n_init, s, lim.h, lim.c);
    for (std::size_t g = 1; g < t.gates.size(); ++g) {
      worst_fixed = std::max(worst_fixed, std::abs(t.gates[g].n_start - lim.n0) / lim.n0);
    }
  }
  DutyCycleSchedule s;
  s.gates_per_cycle = 8;
  s.cooling_time_per_cycle = 1e-3;
  s.total_gates = 64;
  const Trajectory t = evolve(3.0, s, lim.h, lim.c);
  double worst_line = 0.0;
  for (std::size_t i = 2; i < t.samples.size(); ++i) {
    const auto &a = t.samples[i - 2], &b = t.samples[i - 1], &c = t.samples[i];
    if (a.phase != Phase::gate || b.phase != Phase::gate) continue;
    if (c.phase != Phase::gate && c.phase != Phase::cool && c.phase != Phase::end) continue;
    // Three consecutive points on one heating stretch.
    const double cross = (b.n - a.n) * (c.t - a.t) - (c.n - a.n) * (b.t - a.t);
    worst_line = std::max(worst_line, std::abs(cross) / ((c.n - a.n) * (c.t - a.t)));
  }
  o.detail << "n0 = " << fmt(lim.n0) << "; worst relative offset after long cooling "
           << fmt(worst_fixed, 3) << "; worst collinearity residual " << fmt(worst_line, 3);
  o.require(worst_fixed < 1e-3, "long cooling reaches h/c within 0.1%");
  o.require(worst_line <= 1e-12, "heating stretches collinear to 1e-12");
  return o;
}

Outcome criterion_12() {
  Outcome o;
  Fixtures& f = fixtures();
  const CoolingLimitReport lim = cooling_limit(f.case_chain(), f.heating(), kGamma640);
  const FidelityModel fid{f.cs.T2, f.kappa()};
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> gpc(1, 5);
  std::uniform_real_distribution<double> cool(0.0, 3000e-6), radial(0.0, 1.0);
  std::vector<double> mean, total;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const DutyCycleSchedule s = case_schedule(f.cs, gpc(rng), cool(rng), radial(rng));
    EvolveOptions opt;
    opt.fidelity = fid;
    opt.record_samples = false;
    const Trajectory t = evolve(default_initial_n(lim.h, lim.c), s, lim.h, lim.c, opt);
    double log_sum = 0.0;
    for (const auto& g : t.gates) log_sum += std::log(g.fidelity);
    const double ft = total_fidelity(t);
    worst = std::max(worst, std::abs(ft - std::exp(log_sum)) / ft);
    mean.push_back(mean_gate_fidelity(t));
    total.push_back(ft);
  }
  std::vector<int> by_mean(20), by_total(20);
  std::iota(by_mean.begin(), by_mean.end(), 0);
  std::iota(by_total.begin(), by_total.end(), 0);
  std::stable_sort(by_mean.begin(), by_mean.end(), [&](int a, int b) { return mean[a] > mean[b]; });
  std::stable_sort(by_total.begin(), by_total.end(), [&](int a, int b) { return total[a] > total[b]; });
  o.detail << "max |F_total - exp(sum ln F)| / F_total = " << fmt(worst, 3) << "; rankings "
           << (by_mean == by_total ? "agree" : "differ") << " across 20 random schedules";
  o.require(worst <= 1e-12, "F_total = exp(sum ln F) to 1e-12");
  o.require(by_mean == by_total, "<F> and F_total rank schedules identically");
  return o;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_13() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::current_path() / "acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> studies{"equilibrium",    "modes",        "cooling-limit",
                                         "trajectory",     "placement-scan", "coolant-scan",
                                         "duty-scan",      "freq-fill-scan", "calibrate"};
  int compared = 0;
  for (const auto& study : studies) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* threads : {"1", "4"}) {
      const fs::path dir = root / (study + "_" + threads);
      fs::create_directories(dir);
      const std::string cmd = std::string("\"") + IONCOOL_CLI_PATH + "\" " + study +
                              " --threads " + threads + " --out \"" + dir.string() +
                              "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0, study + " exits 0 with --threads " + threads);
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") files[e.path().filename().string()] = read_file(e.path());
      }
      runs.push_back(std::move(files));
    }
    o.require(!runs[0].empty(), study + " writes a CSV");
    o.require(runs[0] == runs[1], study + " CSV identical across runs");
    compared += static_cast<int>(runs[0].size());
  }
  o.detail << compared << " CSV files from " << studies.size()
           << " subcommands byte-identical across two runs (1 and 4 threads)";
  if (o.pass) fs::remove_all(root);
  return o;
}

const std::map<int, std::function<Outcome()>> kCriteria{
    {1, criterion_1},   {2, criterion_2},   {3, criterion_3},   {4, criterion_4},
    {5, criterion_5},   {6, criterion_6},   {7, criterion_7},   {8, criterion_8},
    {9, criterion_9},   {10, criterion_10}, {11, criterion_11}, {12, criterion_12},
    {13, criterion_13},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [n, fn] : kCriteria) selected.push_back(n);
  }
  int failures = 0;
  for (int n : selected) {
    const auto it = kCriteria.find(n);
    if (it == kCriteria.end()) {
      std::cerr << "unknown criterion " << n << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail.str() << "\n";
    for (const auto& note : o.notes) std::cout << "    " << note << "\n";
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
