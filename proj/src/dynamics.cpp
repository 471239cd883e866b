#include "ioncool/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ioncool/errors.hpp"
#include "ioncool/io.hpp"

namespace ioncool {

double DutyCycleSchedule::duty_cycle() const {
  const double cycle = cooling_time_per_cycle + gates_per_cycle * gate_time + radial_overhead;
  return cycle > 0.0 ? cooling_time_per_cycle / cycle : 0.0;
}

double DutyCycleSchedule::axial_duty_cycle() const {
  const double cycle = cooling_time_per_cycle + gates_per_cycle * gate_time;
  return cycle > 0.0 ? cooling_time_per_cycle / cycle : 0.0;
}

double DutyCycleSchedule::attributed_wall_time() const {
  return gate_time + (cooling_time_per_cycle + radial_overhead) / gates_per_cycle;
}

void validate(const DutyCycleSchedule& s) {
  if (!(s.gate_time >= 0.0) || !(s.cooling_time_per_cycle >= 0.0) || !(s.radial_overhead >= 0.0)) {
    throw DomainError("schedule: times must be >= 0");
  }
  if (s.gates_per_cycle < 1) throw DomainError("schedule: gates_per_cycle must be >= 1");
  if (s.total_gates < 1) throw DomainError("schedule: total_gates must be >= 1");
}

void validate(const FidelityModel& m) {
  if (!(m.T2 > 0.0)) throw DomainError("fidelity: T2 must be > 0");
  if (!(m.kappa >= 0.0)) throw DomainError("fidelity: kappa must be >= 0");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::gate: return "gate";
    case Phase::radial: return "radial";
    case Phase::cool: return "cool";
    case Phase::end: return "end";
  }
  return "unknown";
}

double gate_fidelity(const FidelityModel& model, double n, double wall_time) {
  const double kn = model.kappa * n;
  return std::exp(-wall_time / model.T2) / std::sqrt(1.0 + kn * kn);
}

Trajectory evolve(double n_init, const DutyCycleSchedule& schedule, double h, double c,
                  const EvolveOptions& opt) {
  validate(schedule);
  if (!(n_init >= 0.0)) throw DomainError("evolve: n_init must be >= 0");
  if (!(h >= 0.0) || !(c >= 0.0)) throw DomainError("evolve: rates must be >= 0");
  if (opt.fidelity) validate(*opt.fidelity);

  Trajectory traj;
  traj.gates.reserve(static_cast<std::size_t>(schedule.total_gates));
  double t = 0.0;
  double n = n_init;
  const double wall = schedule.attributed_wall_time();
  const double n0 = c > 0.0 ? h / c : 0.0;

  auto sample = [&](Phase p) {
    if (opt.record_samples) traj.samples.push_back({t, n, p});
  };
  auto heat = [&](double dt, Phase p) {
    if (dt <= 0.0) return;
    sample(p);
    n += h * dt;
    t += dt;
  };
  auto cool = [&](double dt) {
    if (dt <= 0.0) return;
    if (c == 0.0) {
      heat(dt, Phase::cool);
      return;
    }
    const double n_start = n;
    const double t_start = t;
    const int pieces = opt.cooling_subsamples + 1;
    for (int k = 1; k <= pieces; ++k) {
      sample(Phase::cool);
      const double tk = dt * k / pieces;
      n = n0 + (n_start - n0) * std::exp(-c * tk);
      t = t_start + tk;
    }
  };

  int done = 0;
  while (done < schedule.total_gates) {
    const int block = std::min(schedule.gates_per_cycle, schedule.total_gates - done);
    for (int g = 0; g < block; ++g) {
      GateRecord rec;
      rec.start = t;
      rec.n_start = n;
      rec.wall_time = wall;
      rec.fidelity = opt.fidelity ? gate_fidelity(*opt.fidelity, n, wall) : 1.0;
      traj.gates.push_back(rec);
      heat(schedule.gate_time, Phase::gate);
    }
    done += block;
    if (done >= schedule.total_gates) break;
    cool(schedule.cooling_time_per_cycle);
    heat(schedule.radial_overhead, Phase::radial);
  }
  if (opt.record_samples) {
    if (traj.samples.empty() || traj.samples.back().t < t) {
      traj.samples.push_back({t, n, Phase::end});
    } else {
      traj.samples.back().phase = Phase::end;
    }
  }
  traj.wall_time = t;
  return traj;
}

double mean_gate_fidelity(const Trajectory& traj) {
  if (traj.gates.empty()) throw DomainError("mean_gate_fidelity: no gates recorded");
  double s = 0.0;
  for (const auto& g : traj.gates) s += g.fidelity;
  return s / static_cast<double>(traj.gates.size());
}

double total_fidelity(const Trajectory& traj) {
  if (traj.gates.empty()) throw DomainError("total_fidelity: no gates recorded");
  double p = 1.0;
  for (const auto& g : traj.gates) p *= g.fidelity;
  return p;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::string_view header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "t_seconds,n_quanta,phase_label\n";
  for (const auto& s : traj.samples) {
    os << format_number(s.t) << ',' << format_number(s.n) << ',' << to_string(s.phase) << '\n';
  }
}

}  // namespace ioncool
