#include "ioncool/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ioncool/errors.hpp"

namespace ioncool {

double gamma_for_rabi_khz(double rabi_khz) {
  for (const auto& row : kRabiGammaTable) {
    if (std::abs(row.rabi_khz - rabi_khz) < 1e-9) return row.gamma;
  }
  throw DomainError("no damping rate tabulated for Rabi frequency " + format_number(rabi_khz) +
                    " kHz (known: 180, 275, 640)");
}

std::string_view to_string(ChainFamily f) {
  return f == ChainFamily::equispaced ? "equispaced" : "fixed";
}

ChainFamily chain_family_from_string(std::string_view s) {
  if (s == "equispaced") return ChainFamily::equispaced;
  if (s == "fixed") return ChainFamily::fixed_potential;
  throw DomainError("unknown chain family '" + std::string(s) + "' (equispaced|fixed)");
}

ChainFactory::ChainFactory(ChainFamily family, double spacing_m, const Normalization& norm,
                           TrapPotential fixed)
    : family_(family), spacing_m_(spacing_m), norm_(norm), fixed_(fixed) {
  if (family_ == ChainFamily::fixed_potential) require_confining(fixed_);
  if (family_ == ChainFamily::equispaced && !(spacing_m_ > 0.0)) {
    throw DomainError("chain factory: spacing must be > 0");
  }
}

TrapPotential ChainFactory::potential(int n_ions) const {
  if (family_ == ChainFamily::fixed_potential) return fixed_;
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(n_ions); it != cache_.end()) return it->second;
  }
  // Calibration is deterministic, so a race only duplicates work.
  const TrapPotential pot = calibrate_equispacing(n_ions, spacing_m_, norm_).potential;
  std::lock_guard lock(mutex_);
  return cache_.emplace(n_ions, pot).first->second;
}

IonChain ChainFactory::chain(int n_ions, int n_coolants, int n_endcaps) const {
  return centered_chain(potential(n_ions), n_ions, n_coolants, n_endcaps);
}

double default_initial_n(double h, double c) { return c > 0.0 ? h / c : 0.0; }

ScheduleMetrics evaluate_schedule(double h, double c, const DutyCycleSchedule& schedule,
                                  const FidelityModel& fidelity, std::optional<double> n_init) {
  EvolveOptions opt;
  opt.fidelity = fidelity;
  opt.record_samples = false;
  const Trajectory traj = evolve(n_init.value_or(default_initial_n(h, c)), schedule, h, c, opt);
  ScheduleMetrics m;
  m.mean_fidelity = mean_gate_fidelity(traj);
  m.total_fidelity = total_fidelity(traj);
  m.wall_time = traj.wall_time;
  m.duty = schedule.duty_cycle();
  m.axial_duty = schedule.axial_duty_cycle();
  for (const auto& g : traj.gates) m.n_max = std::max(m.n_max, g.n_start);
  return m;
}

DutyCycleSchedule case_schedule(const CaseStudy& cs, int gates_per_cycle,
                                double cooling_per_gate, double radial_factor) {
  DutyCycleSchedule s;
  s.gate_time = cs.gate_time;
  s.gates_per_cycle = gates_per_cycle;
  s.total_gates = cs.total_gates;
  s.cooling_time_per_cycle = cooling_per_gate * gates_per_cycle;
  s.radial_overhead = radial_factor * s.cooling_time_per_cycle;
  return s;
}

double cooling_for_duty(double duty, double gate_time) {
  if (!(duty >= 0.0 && duty < 1.0)) throw DomainError("duty cycle must be in [0, 1)");
  return duty / (1.0 - duty) * gate_time;
}

std::vector<double> cooling_grid(double step, double max) {
  if (!(step > 0.0) || !(max >= 0.0)) throw DomainError("cooling grid: bad step or range");
  const auto count = static_cast<std::size_t>(std::floor(max / step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = step * static_cast<double>(i);
  return g;
}

// ---------------------------------------------------------------- duty scan

DutyScanResult sweep_duty_cycle(const IonChain& chain, const HeatingModel& heating,
                                const DutyScanSpec& spec, unsigned threads) {
  if (spec.gammas.empty() || spec.gates_per_cycle.empty()) {
    throw DomainError("duty scan: empty grid");
  }
  const std::vector<double> cool = cooling_grid(spec.cooling_step, spec.cooling_max);
  const FidelityModel fid{spec.case_study.T2, spec.kappa};
  validate(fid);

  const ModeSpectrum spectrum = normal_modes(chain);
  std::vector<CoolingLimitReport> limits(spec.gammas.size());
  for (std::size_t g = 0; g < spec.gammas.size(); ++g) {
    limits[g] = cooling_limit(chain, spectrum, heating, spec.gammas[g]);
  }

  const std::size_t n_gpc = spec.gates_per_cycle.size();
  const std::size_t n_cool = cool.size();
  DutyScanResult r;
  r.points.resize(spec.gammas.size() * n_gpc * n_cool);
  parallel_for(r.points.size(), threads, [&](std::size_t i) {
    const std::size_t g = i / (n_gpc * n_cool);
    const std::size_t k = (i / n_cool) % n_gpc;
    const std::size_t t = i % n_cool;
    DutyPoint& p = r.points[i];
    p.gamma = spec.gammas[g];
    p.gates_per_cycle = spec.gates_per_cycle[k];
    p.cooling_per_gate = cool[t];
    p.h = limits[g].h;
    p.c = limits[g].c;
    p.n0 = limits[g].n0;
    p.metrics = evaluate_schedule(
        p.h, p.c, case_schedule(spec.case_study, p.gates_per_cycle, p.cooling_per_gate,
                                spec.radial_factor),
        fid, spec.n_init);
  });

  for (std::size_t g = 0; g < spec.gammas.size(); ++g) {
    const DutyPoint* best_gamma = nullptr;
    for (std::size_t k = 0; k < n_gpc; ++k) {
      const auto first = r.points.begin() + static_cast<std::ptrdiff_t>((g * n_gpc + k) * n_cool);
      const auto best = std::max_element(first, first + static_cast<std::ptrdiff_t>(n_cool),
                                         [](const DutyPoint& a, const DutyPoint& b) {
                                           return a.metrics.mean_fidelity < b.metrics.mean_fidelity;
                                         });
      r.optima.push_back(*best);
      if (!best_gamma || best->metrics.mean_fidelity > best_gamma->metrics.mean_fidelity) {
        best_gamma = &*best;
      }
    }
    r.best_per_gamma.push_back(*best_gamma);
  }
  return r;
}

DutyScanResult sweep_duty_cycle_with_radial(const IonChain& chain, const HeatingModel& heating,
                                            DutyScanSpec spec, double radial_factor,
                                            unsigned threads) {
  if (!(radial_factor >= 0.0)) throw DomainError("radial overhead factor must be >= 0");
  spec.radial_factor = radial_factor;
  return sweep_duty_cycle(chain, heating, spec, threads);
}

Table duty_table(const DutyScanResult& r) {
  Table t;
  t.columns = {"gamma",          "gates_per_cycle", "cooling_us_per_gate", "duty",
               "axial_duty",     "h_per_s",         "c_per_s",             "n0",
               "mean_fidelity",  "total_fidelity",  "wall_time_s",         "n_max"};
  for (const auto& p : r.points) {
    t.add_row({format_number(p.gamma), std::to_string(p.gates_per_cycle),
               format_number(p.cooling_per_gate * 1e6), format_number(p.metrics.duty),
               format_number(p.metrics.axial_duty), format_number(p.h), format_number(p.c),
               format_number(p.n0), format_number(p.metrics.mean_fidelity),
               format_number(p.metrics.total_fidelity), format_number(p.metrics.wall_time),
               format_number(p.metrics.n_max)});
  }
  return t;
}

// ----------------------------------------------------- continuous optimum

CoolingOptimum optimal_cooling_time(double h, double c, const CaseStudy& cs,
                                    int gates_per_cycle, const FidelityModel& fidelity,
                                    double radial_factor, double max,
                                    std::optional<double> n_init) {
  auto score = [&](double t) {
    return evaluate_schedule(h, c, case_schedule(cs, gates_per_cycle, t, radial_factor),
                             fidelity, n_init)
        .mean_fidelity;
  };
  constexpr int kSamples = 400;
  const double step = max / kSamples;
  int best = 0;
  double best_f = score(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double f = score(step * i);
    if (f > best_f) {
      best_f = f;
      best = i;
    }
  }
  double a = std::max(0.0, step * (best - 1));
  double b = std::min(max, step * (best + 1));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = score(x1);
  double f2 = score(x2);
  while (b - a > 1e-9) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = score(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = score(x1);
    }
  }
  double t = 0.5 * (a + b);
  if (score(t) < best_f) t = step * best;
  CoolingOptimum opt;
  opt.cooling_per_gate = t;
  opt.metrics = evaluate_schedule(h, c, case_schedule(cs, gates_per_cycle, t, radial_factor),
                                  fidelity, n_init);
  return opt;
}

namespace {

// Bisection on log(kappa) for an increasing function of kappa.
template <class F>
double bisect_log_kappa(F&& increasing, double target, double lo, double hi) {
  double flo = increasing(lo);
  double fhi = increasing(hi);
  if (!(flo <= target && target <= fhi)) {
    throw DomainError("kappa calibration: target " + format_number(target) +
                      " outside reachable range [" + format_number(flo) + ", " +
                      format_number(fhi) + "]");
  }
  double a = std::log(lo);
  double b = std::log(hi);
  for (int i = 0; i < 80 && b - a > 1e-12; ++i) {
    const double m = 0.5 * (a + b);
    (increasing(std::exp(m)) < target ? a : b) = m;
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace

double calibrate_kappa_to_duty(double h, double c, const CaseStudy& cs, int gates_per_cycle,
                               double target_duty, std::optional<double> n_init) {
  if (!(target_duty > 0.0 && target_duty < 1.0)) {
    throw DomainError("kappa calibration: target duty must be in (0, 1)");
  }
  if (!(c > 0.0)) throw NoCoolingError("kappa calibration needs a cooled chain");
  // Search range for the optimum: a few times the target cooling time.
  const double max = 4.0 * cooling_for_duty(target_duty, cs.gate_time);
  auto duty_at = [&](double kappa) {
    return optimal_cooling_time(h, c, cs, gates_per_cycle, {cs.T2, kappa}, 0.0, max, n_init)
        .metrics.axial_duty;
  };
  return bisect_log_kappa(duty_at, target_duty, 1e-8, 1e2);
}

double calibrate_kappa_to_fidelity(double h, double c, const CaseStudy& cs,
                                   int gates_per_cycle, double target,
                                   std::optional<double> n_init) {
  if (!(c > 0.0)) throw NoCoolingError("kappa calibration needs a cooled chain");
  const double max = 20.0 * cs.gate_time;
  auto infidelity = [&](double kappa) {
    return -optimal_cooling_time(h, c, cs, gates_per_cycle, {cs.T2, kappa}, 0.0, max, n_init)
                .metrics.mean_fidelity;
  };
  return bisect_log_kappa(infidelity, -target, 1e-10, 1e2);
}

// ----------------------------------------------------- coolant-count scan

CoolantScanResult sweep_coolant_count(const ChainFactory& factory, const HeatingModel& heating,
                                      const CoolantScanSpec& spec, unsigned threads) {
  if (spec.coolant_counts.empty() || spec.duties.empty()) {
    throw DomainError("coolant scan: empty grid");
  }
  for (int n : spec.coolant_counts) {
    if (n < 0) throw DomainError("coolant scan: counts must be >= 0");
  }
  const FidelityModel fid{spec.case_study.T2, spec.kappa};
  validate(fid);

  // Chain-level quantities do not depend on the duty setting.
  struct ChainResult {
    bool ok = false;
    std::string error;
    int n_ions = 0;
    double f_hz = 0.0, s = 0.0, h = 0.0, c = 0.0;
  };
  std::vector<ChainResult> chains(spec.coolant_counts.size());
  parallel_for(chains.size(), threads, [&](std::size_t i) {
    ChainResult& cr = chains[i];
    const int nc = spec.coolant_counts[i];
    cr.n_ions = spec.case_study.n_ions(nc);
    try {
      const IonChain chain = factory.chain(cr.n_ions, nc, spec.case_study.n_endcaps);
      const ModeSpectrum spectrum = normal_modes(chain);
      const int com = com_mode_index(spectrum);
      const double omega0 = rate_to_si(spectrum.frequencies(com));
      cr.f_hz = omega0 / (2.0 * std::numbers::pi);
      cr.h = com_heating_rate(heating, omega0, cr.n_ions);
      if (nc > 0) {
        const CoolingLimitReport rep =
            cooling_limit(chain, spectrum, heating, spec.gamma, spec.method);
        cr.c = rep.c;
        cr.s = rep.participation;
      }
      cr.ok = true;
    } catch (const Error& e) {
      cr.error = e.what();
    }
  });

  CoolantScanResult r;
  r.points.resize(spec.duties.size() * chains.size());
  parallel_for(r.points.size(), threads, [&](std::size_t i) {
    const std::size_t d = i / chains.size();
    const ChainResult& cr = chains[i % chains.size()];
    CoolantPoint& p = r.points[i];
    p.n_coolants = spec.coolant_counts[i % chains.size()];
    p.n_ions = cr.n_ions;
    p.duty = spec.duties[d];
    p.cooling_per_gate = cooling_for_duty(p.duty, spec.case_study.gate_time);
    p.ok = cr.ok;
    p.error = cr.error;
    if (!cr.ok) return;
    p.com_frequency_hz = cr.f_hz;
    p.participation = cr.s;
    p.h = cr.h;
    p.c = cr.c;
    p.n0 = cr.c > 0.0 ? cr.h / cr.c : std::numeric_limits<double>::infinity();
    p.metrics = evaluate_schedule(
        p.h, p.c, case_schedule(spec.case_study, spec.gates_per_cycle, p.cooling_per_gate), fid);
  });

  for (std::size_t d = 0; d < spec.duties.size(); ++d) {
    const CoolantPoint* best = nullptr;
    for (std::size_t k = 0; k < chains.size(); ++k) {
      const CoolantPoint& p = r.points[d * chains.size() + k];
      if (p.ok && (!best || p.metrics.mean_fidelity > best->metrics.mean_fidelity)) best = &p;
    }
    if (best) r.best_per_duty.push_back(*best);
  }
  return r;
}

Table coolant_table(const CoolantScanResult& r) {
  Table t;
  t.columns = {"duty",          "cooling_us_per_gate", "n_coolants",    "n_ions",
               "status",        "com_frequency_hz",    "participation", "h_per_s",
               "c_per_s",       "n0",                  "mean_fidelity", "total_fidelity"};
  for (const auto& p : r.points) {
    if (!p.ok) {
      t.add_row({format_number(p.duty), format_number(p.cooling_per_gate * 1e6),
                 std::to_string(p.n_coolants), std::to_string(p.n_ions), "failed", "", "", "",
                 "", "", "", ""});
      continue;
    }
    t.add_row({format_number(p.duty), format_number(p.cooling_per_gate * 1e6),
               std::to_string(p.n_coolants), std::to_string(p.n_ions), "ok",
               format_number(p.com_frequency_hz), format_number(p.participation),
               format_number(p.h), format_number(p.c), format_number(p.n0),
               format_number(p.metrics.mean_fidelity), format_number(p.metrics.total_fidelity)});
  }
  return t;
}

// ------------------------------------------------------ placement search

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    // r * num / i is exact at every step; check for overflow first.
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::vector<Placement> enumerate_placements(const IonChain& chain, int n_coolants,
                                            const HeatingModel& heating, double gamma,
                                            CoolingMethod method, unsigned threads,
                                            std::uint64_t guard) {
  std::vector<int> sites;
  for (int i = 0; i < chain.size(); ++i) {
    if (std::find(chain.endcaps.begin(), chain.endcaps.end(), i) == chain.endcaps.end()) {
      sites.push_back(i);
    }
  }
  const int m = static_cast<int>(sites.size());
  if (n_coolants < 1 || n_coolants > m) {
    throw DomainError("placement search: need 1 <= N_C <= " + std::to_string(m));
  }
  const std::uint64_t count = binomial(m, n_coolants);
  if (count > guard) {
    throw GuardExceeded("placement search: " + std::to_string(count) +
                            " configurations exceed the limit of " + std::to_string(guard),
                        count);
  }

  std::vector<std::vector<int>> combos;
  combos.reserve(count);
  std::vector<int> pick(static_cast<std::size_t>(n_coolants));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<int> c(pick.size());
    for (std::size_t i = 0; i < pick.size(); ++i) c[i] = sites[static_cast<std::size_t>(pick[i])];
    combos.push_back(std::move(c));
    int i = n_coolants - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - n_coolants + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n_coolants; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  const ModeSpectrum spectrum = normal_modes(chain);
  std::vector<Placement> out(combos.size());
  parallel_for(combos.size(), threads, [&](std::size_t i) {
    IonChain trial = chain;
    trial.coolants = combos[i];
    trial.qubits.clear();
    for (int s : sites) {
      if (!std::binary_search(trial.coolants.begin(), trial.coolants.end(), s)) {
        trial.qubits.push_back(s);
      }
    }
    const CoolingLimitReport rep = cooling_limit(trial, spectrum, heating, gamma, method);
    Placement& p = out[i];
    p.coolants = combos[i];
    for (int idx : p.coolants) p.labels.push_back(label_from_index(idx, chain.size()));
    p.n0 = rep.n0;
    p.c = rep.c;
    p.h = rep.h;
    p.participation = rep.participation;
  });
  // Mirror placements agree only to round-off; rank on n0 rounded to ten
  // significant digits so ties fall back to lexicographic order.
  auto key = [](double v) { return std::stod(format_significant(v, 10)); };
  std::stable_sort(out.begin(), out.end(), [&](const Placement& a, const Placement& b) {
    return key(a.n0) < key(b.n0);
  });
  return out;
}

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

Table placement_table(const std::vector<Placement>& ranked) {
  Table t;
  t.columns = {"rank", "coolant_labels", "coolant_indices", "participation",
               "c_per_s", "h_per_s", "n0"};
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const Placement& p = ranked[i];
    t.add_row({std::to_string(i + 1), join(p.labels), join(p.coolants),
               format_number(p.participation), format_number(p.c), format_number(p.h),
               format_number(p.n0)});
  }
  return t;
}

// ------------------------------------------------- frequency x fill map

TrapPotential scale_potential(const TrapPotential& base, double ratio) {
  if (!(ratio > 0.0)) throw DomainError("scale_potential: ratio must be > 0");
  const double s = std::pow(ratio, 2.0 / 3.0);
  return {base.x2 * s * s * s, base.x4 * s * s * s * s * s};
}

std::vector<FreqFillCell> sweep_frequency_fill(const TrapPotential& base,
                                               const HeatingModel& heating,
                                               const FreqFillSpec& spec, unsigned threads) {
  if (spec.com_frequencies_hz.empty()) throw DomainError("frequency grid is empty");
  std::vector<int> counts = spec.coolant_counts;
  if (counts.empty()) {
    counts.resize(static_cast<std::size_t>(spec.n_ions));
    std::iota(counts.begin(), counts.end(), 1);
  }
  for (int k : counts) {
    if (k < 1 || k > spec.n_ions) throw DomainError("fill: coolant counts must be in [1, N]");
  }
  for (double f : spec.com_frequencies_hz) {
    if (!(f > 0.0)) throw DomainError("frequency grid values must be > 0");
  }

  const Eigen::VectorXd u_base = solve_equilibrium(base, spec.n_ions);
  const ModeSpectrum base_spec = normal_modes(hessian(base, u_base));
  const double f_base =
      rate_to_si(base_spec.frequencies(com_mode_index(base_spec))) / (2.0 * std::numbers::pi);

  const std::size_t nk = counts.size();
  std::vector<FreqFillCell> cells(spec.com_frequencies_hz.size() * nk);
  parallel_for(spec.com_frequencies_hz.size(), threads, [&](std::size_t fi) {
    const double ratio = spec.com_frequencies_hz[fi] / f_base;
    const TrapPotential pot = scale_potential(base, ratio);
    const Eigen::VectorXd guess = u_base / std::pow(ratio, 2.0 / 3.0);
    const Eigen::VectorXd u = solve_equilibrium(pot, spec.n_ions, guess);
    IonChain chain = make_chain(pot, u, {});
    const ModeSpectrum spectrum = normal_modes(chain);
    const double f_com =
        rate_to_si(spectrum.frequencies(com_mode_index(spectrum))) / (2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < nk; ++k) {
      IonChain c = chain;
      c.coolants = centered_indices(spec.n_ions, counts[k]);
      c.qubits.clear();
      for (int i = 0; i < spec.n_ions; ++i) {
        if (!std::binary_search(c.coolants.begin(), c.coolants.end(), i)) c.qubits.push_back(i);
      }
      const CoolingLimitReport rep = cooling_limit(c, spectrum, heating, spec.gamma, spec.method);
      FreqFillCell& cell = cells[fi * nk + k];
      cell.target_hz = spec.com_frequencies_hz[fi];
      cell.com_frequency_hz = f_com;
      cell.x2 = pot.x2;
      cell.x4 = pot.x4;
      cell.n_coolants = counts[k];
      cell.fill = static_cast<double>(counts[k]) / spec.n_ions;
      cell.h = rep.h;
      cell.c = rep.c;
      cell.n0 = rep.n0;
    }
  });
  return cells;
}

Table freq_fill_table(const std::vector<FreqFillCell>& cells) {
  Table t;
  t.columns = {"target_hz", "com_frequency_hz", "x2", "x4", "n_coolants",
               "fill", "h_per_s", "c_per_s", "n0"};
  for (const auto& c : cells) {
    t.add_row({format_number(c.target_hz), format_number(c.com_frequency_hz),
               format_number(c.x2), format_number(c.x4), std::to_string(c.n_coolants),
               format_number(c.fill), format_number(c.h), format_number(c.c),
               format_number(c.n0)});
  }
  return t;
}

}  // namespace ioncool
