#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ioncool {

/// Repeating gate/cool cycle. Each cycle runs `gates_per_cycle` gates, then
/// axial cooling, then the radial overhead (no gates, no axial cooling).
/// The circuit ends after the last gate. All times in seconds.
struct DutyCycleSchedule {
  double gate_time = 250e-6;
  int gates_per_cycle = 1;
  double cooling_time_per_cycle = 0.0;
  int total_gates = 500;
  double radial_overhead = 0.0;

  /// cooling / (cooling + gates * gate_time + radial).
  double duty_cycle() const;
  /// cooling / (cooling + gates * gate_time), ignoring the radial wait.
  double axial_duty_cycle() const;
  /// Wall time charged to each gate: its own duration plus its share of the
  /// cycle's cooling and radial time.
  double attributed_wall_time() const;
};

void validate(const DutyCycleSchedule& s);

/// F(n, t) = (1 + (kappa n)^2)^(-1/2) exp(-t / T2).
struct FidelityModel {
  double T2 = 0.5;        // s
  double kappa = 0.0;     // motional sensitivity per quantum
};

void validate(const FidelityModel& m);

enum class Phase { gate, radial, cool, end };

std::string_view to_string(Phase p);

struct TrajectorySample {
  double t = 0.0;  // s
  double n = 0.0;  // quanta
  Phase phase = Phase::gate;  // phase of the segment starting at t
};

struct GateRecord {
  double start = 0.0;
  double n_start = 0.0;
  double wall_time = 0.0;
  double fidelity = 1.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<GateRecord> gates;
  double wall_time = 0.0;  // circuit duration, s
};

struct EvolveOptions {
  std::optional<FidelityModel> fidelity;
  /// Extra samples inside each cooling segment (0 = segment endpoints only).
  int cooling_subsamples = 0;
  bool record_samples = true;
};

/// Piecewise closed-form evolution of the COM phonon number under
/// dn/dt = h during gates and radial waits, dn/dt = h - c n while cooling.
Trajectory evolve(double n_init, const DutyCycleSchedule& schedule, double h, double c,
                  const EvolveOptions& opt = {});

double gate_fidelity(const FidelityModel& model, double n, double wall_time);

/// Arithmetic mean of per-gate fidelities.
double mean_gate_fidelity(const Trajectory& traj);
/// Product of per-gate fidelities.
double total_fidelity(const Trajectory& traj);

/// CSV rows `t_seconds,n_quanta,phase_label`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::string_view header_comment = {});

}  // namespace ioncool
