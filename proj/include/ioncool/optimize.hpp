#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ioncool/chain.hpp"
#include "ioncool/dynamics.hpp"
#include "ioncool/io.hpp"
#include "ioncool/limit.hpp"

namespace ioncool {

/// Damping rates for the cooling-beam Rabi frequencies of the case study.
struct RabiGamma {
  double rabi_khz;
  double gamma;
};
inline constexpr RabiGamma kRabiGammaTable[] = {
    {180.0, 1.387e-5},
    {275.0, 3.468e-5},
    {640.0, 5.328e-5},
};

/// Table lookup; throws DomainError for frequencies not in the table.
double gamma_for_rabi_khz(double rabi_khz);

/// Fixed parameters of the 500-gate case study circuit.
struct CaseStudy {
  int n_qubits = 14;
  int n_endcaps = 2;
  double gate_time = 250e-6;  // s
  int total_gates = 500;
  double T2 = 0.5;            // s

  int n_ions(int n_coolants) const { return n_coolants + n_qubits + n_endcaps; }
};

/// How a chain's trap potential is chosen as the ion count changes.
enum class ChainFamily {
  equispaced,      // recalibrated per N to a target spacing
  fixed_potential  // one (x2, x4) for every N
};

std::string_view to_string(ChainFamily f);
ChainFamily chain_family_from_string(std::string_view s);

/// Produces centered-coolant chains for a family. Calibrated potentials are
/// cached per ion count; safe to share between worker threads.
class ChainFactory {
 public:
  ChainFactory(ChainFamily family, double spacing_m, const Normalization& norm,
               TrapPotential fixed = {});

  TrapPotential potential(int n_ions) const;
  IonChain chain(int n_ions, int n_coolants, int n_endcaps) const;

  ChainFamily family() const { return family_; }

 private:
  ChainFamily family_;
  double spacing_m_;
  Normalization norm_;
  TrapPotential fixed_;
  mutable std::mutex mutex_;
  mutable std::map<int, TrapPotential> cache_;
};

/// Steady-state occupation used as the default starting point of a circuit:
/// h / c, or 0 without cooling.
double default_initial_n(double h, double c);

struct ScheduleMetrics {
  double mean_fidelity = 0.0;
  double total_fidelity = 0.0;
  double wall_time = 0.0;   // s
  double duty = 0.0;        // cooling / full cycle
  double axial_duty = 0.0;  // cooling / (cooling + gates)
  double n_max = 0.0;       // largest occupation seen at a gate start
};

ScheduleMetrics evaluate_schedule(double h, double c, const DutyCycleSchedule& schedule,
                                  const FidelityModel& fidelity,
                                  std::optional<double> n_init = std::nullopt);

/// Schedule of the case study with `cooling_per_gate` seconds of cooling per
/// gate; radial wait = factor * cooling time of the cycle.
DutyCycleSchedule case_schedule(const CaseStudy& cs, int gates_per_cycle,
                                double cooling_per_gate, double radial_factor = 0.0);

/// Cooling time per gate for a given axial duty cycle.
double cooling_for_duty(double duty, double gate_time);

// ---------------------------------------------------------------- duty scan

struct DutyScanSpec {
  CaseStudy case_study;
  std::vector<double> gammas{1.387e-5, 3.468e-5, 5.328e-5};
  std::vector<int> gates_per_cycle{1, 2, 3, 4, 5};
  double cooling_step = 25e-6;  // s per gate
  double cooling_max = 4000e-6;  // s per gate
  double radial_factor = 0.0;
  double kappa = 0.0;
  std::optional<double> n_init;
};

struct DutyPoint {
  double gamma = 0.0;
  int gates_per_cycle = 1;
  double cooling_per_gate = 0.0;  // s
  double h = 0.0;
  double c = 0.0;
  double n0 = 0.0;
  ScheduleMetrics metrics;
};

struct DutyScanResult {
  std::vector<DutyPoint> points;  // gamma-major, then gates/cycle, then cooling
  /// Argmax of mean fidelity for each (gamma, gates/cycle), same order.
  std::vector<DutyPoint> optima;
  /// Best of `optima` for each gamma.
  std::vector<DutyPoint> best_per_gamma;
};

std::vector<double> cooling_grid(double step, double max);

DutyScanResult sweep_duty_cycle(const IonChain& chain, const HeatingModel& heating,
                                const DutyScanSpec& spec, unsigned threads = 1);

/// Same scan with the radial wait active (radial_factor overrides spec's).
DutyScanResult sweep_duty_cycle_with_radial(const IonChain& chain, const HeatingModel& heating,
                                            DutyScanSpec spec, double radial_factor,
                                            unsigned threads = 1);

Table duty_table(const DutyScanResult& r);

// ----------------------------------------------------- continuous optimum

struct CoolingOptimum {
  double cooling_per_gate = 0.0;  // s
  ScheduleMetrics metrics;
};

/// Maximizes mean fidelity over cooling time per gate in [0, max] (coarse
/// scan, then golden-section refinement around the best sample).
CoolingOptimum optimal_cooling_time(double h, double c, const CaseStudy& cs,
                                    int gates_per_cycle, const FidelityModel& fidelity,
                                    double radial_factor = 0.0, double max = 6000e-6,
                                    std::optional<double> n_init = std::nullopt);

/// kappa for which the optimal axial duty cycle equals `target_duty`.
double calibrate_kappa_to_duty(double h, double c, const CaseStudy& cs, int gates_per_cycle,
                               double target_duty, std::optional<double> n_init = std::nullopt);

/// kappa for which the best achievable mean fidelity equals `target`.
/// Throws DomainError when the dephasing floor alone is below the target.
double calibrate_kappa_to_fidelity(double h, double c, const CaseStudy& cs,
                                   int gates_per_cycle, double target,
                                   std::optional<double> n_init = std::nullopt);

// ----------------------------------------------------- coolant-count scan

struct CoolantScanSpec {
  CaseStudy case_study;
  std::vector<int> coolant_counts{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<double> duties{0.5, 0.6841, 0.8};  // axial duty at each setting
  int gates_per_cycle = 1;
  double gamma = 5.328e-5;
  double kappa = 0.0;
  CoolingMethod method = CoolingMethod::exact;
};

struct CoolantPoint {
  int n_coolants = 0;
  int n_ions = 0;
  double duty = 0.0;
  double cooling_per_gate = 0.0;
  bool ok = false;
  std::string error;
  double com_frequency_hz = 0.0;
  double participation = 0.0;
  double h = 0.0;
  double c = 0.0;
  double n0 = 0.0;  // inf without cooling
  ScheduleMetrics metrics;
};

struct CoolantScanResult {
  std::vector<CoolantPoint> points;  // duty-major, then coolant count
  std::vector<CoolantPoint> best_per_duty;
};

CoolantScanResult sweep_coolant_count(const ChainFactory& factory, const HeatingModel& heating,
                                      const CoolantScanSpec& spec, unsigned threads = 1);

Table coolant_table(const CoolantScanResult& r);

// ------------------------------------------------------ placement search

struct Placement {
  std::vector<int> coolants;  // indices
  std::vector<int> labels;    // center offsets
  double n0 = 0.0;
  double c = 0.0;  // 1/s
  double h = 0.0;
  double participation = 0.0;
};

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Every placement of `n_coolants` coolants on the non-endcap ions of
/// `chain` (its own coolant set is ignored), ranked by ascending n0 with
/// ties kept in lexicographic order. Throws GuardExceeded above `guard`.
std::vector<Placement> enumerate_placements(const IonChain& chain, int n_coolants,
                                            const HeatingModel& heating, double gamma,
                                            CoolingMethod method = CoolingMethod::exact,
                                            unsigned threads = 1,
                                            std::uint64_t guard = 1'000'000);

Table placement_table(const std::vector<Placement>& ranked);

// ------------------------------------------------- frequency x fill map

struct FreqFillSpec {
  int n_ions = 21;
  std::vector<double> com_frequencies_hz{100e3, 150e3, 200e3, 250e3, 300e3, 350e3, 400e3};
  std::vector<int> coolant_counts;  // empty = 1..n_ions
  double gamma = 5.328e-5;
  CoolingMethod method = CoolingMethod::exact;
};

struct FreqFillCell {
  double target_hz = 0.0;
  double com_frequency_hz = 0.0;
  double x2 = 0.0;
  double x4 = 0.0;
  int n_coolants = 0;
  double fill = 0.0;
  double h = 0.0;
  double c = 0.0;
  double n0 = 0.0;
};

/// Rescales `base` (an n_ions equilibrium potential) so the COM frequency
/// hits each target: positions shrink by s, x2 -> s^3 x2, x4 -> s^5 x4,
/// frequencies grow by s^(3/2). Frequency-major order.
std::vector<FreqFillCell> sweep_frequency_fill(const TrapPotential& base,
                                               const HeatingModel& heating,
                                               const FreqFillSpec& spec, unsigned threads = 1);

/// Potential with the same chain shape as `base` and COM frequency scaled by
/// `ratio`.
TrapPotential scale_potential(const TrapPotential& base, double ratio);

Table freq_fill_table(const std::vector<FreqFillCell>& cells);

}  // namespace ioncool
