#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lobvol/hausman.hpp"
#include "lobvol/simulator.hpp"

namespace lobvol {

enum class Frequency { Tick, Sec1, Sec15, Sec30 };

std::string to_string(Frequency f);
std::string to_string(VolRegime v);
std::string to_string(NoiseRegime r);
Frequency frequency_from_name(const std::string& s);
VolRegime vol_regime_from_name(const std::string& s);
NoiseRegime noise_regime_from_name(const std::string& s);

// One residual-noise level; mix alternates noise-free and noisy days.
struct NoiseLevel {
  double a2 = 0.0;
  bool mix = false;
  std::string label() const;
};

struct StudyConfig {
  std::vector<VolRegime> vol = {VolRegime::Constant};
  std::vector<NoiseLevel> levels = {NoiseLevel{}};
  NoiseRegime noise = NoiseRegime::H1;  // law of the residual noise when a2 > 0
  double mix_a2 = 1e-9;
  std::vector<ModelKind> models = {ModelKind::Roll};
  std::vector<Frequency> freqs = {Frequency::Tick};
  std::vector<int> stats;  // empty: 1, 2 on tick data and 3, 4, 5 otherwise
  std::size_t replications = 500;
  double level = 0.05;
  std::uint64_t seed = 20240101;
  unsigned threads = 0;  // 0: LOBVOL_THREADS or the hardware count
  TestConfig test;
  ScenarioConfig base;  // non-grid, non-noise fields copied into every cell
};

// Worker count honouring the override variable.
unsigned worker_count(unsigned requested);

// Calls fn(rep) for rep in [0, m) on a pool of workers.
void parallel_for(std::size_t m, unsigned threads, const std::function<void(std::size_t)>& fn);

// Scenario of replication rep in one study cell.
ScenarioConfig cell_scenario(const StudyConfig& cfg, VolRegime vol, const NoiseLevel& level,
                             ModelKind model, Frequency freq, std::size_t rep);

struct RejectionRow {
  std::string vol, noise, level, model, freq;
  int stat = 0;
  double fraction = 0.0;
  double mc_stderr = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_fail = 0;
};

// Throws StudyDegenerate when failures reach 1% of the replications.
std::vector<RejectionRow> rejection_study(const StudyConfig& cfg);

struct EstimatorRow {
  std::string vol, level, model, freq, estimator;
  double bias = 0.0;
  double stdev = 0.0;
  double rmse = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_fail = 0;
};

// Estimators: S, QMLEexp, QMLEerr, E-QMLE, QMLE, RV against sigma2_bar0.
std::vector<EstimatorRow> estimator_study(const StudyConfig& cfg);

void write_csv(std::ostream& os, const std::vector<RejectionRow>& rows);
void write_csv(std::ostream& os, const std::vector<EstimatorRow>& rows);

}  // namespace lobvol
