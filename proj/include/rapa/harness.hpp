#ifndef RAPA_HARNESS_HPP
#define RAPA_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rapa/allocation.hpp"
#include "rapa/model.hpp"
#include "rapa/policies.hpp"

namespace rapa {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Range&) const = default;
};

enum class BudgetMode { random, fraction };

/// Everything needed to reproduce an experiment. Unspecified generator ranges
/// get the defaults below and are echoed into every output header.
struct ExperimentConfig {
  std::string experiment_id = "experiment";
  std::size_t n = 25;
  std::size_t horizon = 20;
  std::vector<std::uint64_t> seeds = {1};

  double alpha = 0.05;
  std::vector<double> alphas = {0.01, 0.05, 0.10, 0.15, 0.20, 0.25};

  double p_max = 0.5;
  std::vector<double> p_max_levels = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

  BudgetMode budget_mode = BudgetMode::random;
  double budget_fraction = 0.5;  // used when budget_mode == fraction
  std::vector<double> budget_fractions = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  Range weight_range{0.5, 2.0};
  Range cost_range{0.1, 2.0};
  Range r_min_range{1.0, 3.0};
  Range r_span_range{2.0, 8.0};  // r_max = r_min + span

  /// Empty means the subcommand's default set.
  std::vector<PolicyId> policies;

  VarianceForm variance_form = VarianceForm::paper;
  std::size_t exact_max_n = 256;
  double tol_bal = kDefaultTolBal;

  /// Worker threads; 0 means std::thread::hardware_concurrency().
  std::size_t jobs = 0;
  /// When false the wall_seconds column is written as 0 so outputs are byte-stable.
  bool record_wall_time = true;

  /// Throws ValidationError when a range is empty or out of domain.
  void validate() const;
  [[nodiscard]] EpisodeOptions episode_options() const;
};

[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Fields absent from `j` keep their value in `base`.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Draws one instance. Every quantity comes from its own counter stream keyed
/// by the seed, so p_max or the budget setting can change without moving the
/// other draws: p_i = p_max * q_i with q_i ~ U(0,1), and R = sum r_min +
/// u (sum r_max - sum r_min) with u ~ U(0,1) or the configured fraction.
[[nodiscard]] Instance generate_instance(const ExperimentConfig& cfg, std::uint64_t seed);

/// Same instance with the budget at fraction f of [sum r_min, sum r_max].
[[nodiscard]] Instance with_budget_fraction(Instance inst, double f);

/// y[t][i] = 1 iff u(t, i) < p_i with u from the seed's attack stream, so traces
/// for different p are coupled draw-by-draw.
[[nodiscard]] AttackTrace sample_attacks(std::span<const double> p, std::size_t horizon,
                                         std::uint64_t seed);

struct ResultRow {
  std::string experiment_id;
  PolicyId policy = PolicyId::un_mean;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t horizon = 0;
  double alpha = 0.0;
  double p_max = 0.0;
  double budget = 0.0;
  double total_damage = 0.0;
  double total_transfer_cost = 0.0;
  double total_epsilon = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> budget_fraction;  // resource sweep only
  std::optional<bool> nondominated;       // alpha sweep only
};

struct SlotRow {
  std::string experiment_id;
  PolicyId policy = PolicyId::un_mean;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double p_max = 0.0;
  double budget = 0.0;
  SlotResult slot;
};

struct AggregateRow {
  std::string experiment_id;
  PolicyId policy = PolicyId::un_mean;
  std::string level_name;  // "alpha", "p_max", "r_fraction" or empty
  double level = 0.0;
  std::size_t seeds = 0;
  double mean_damage = 0.0;
  double mean_transfer_cost = 0.0;
  double mean_epsilon = 0.0;
  double mean_wall_seconds = 0.0;
  std::optional<bool> nondominated;
};

struct ResultsTable {
  nlohmann::json config;
  std::vector<ResultRow> rows;
  std::vector<SlotRow> slot_rows;  // filled only when requested
  std::vector<AggregateRow> aggregates;
};

struct RunOptions {
  bool keep_slots = false;
};

/// Every configured policy on every seed, all policies sharing the seed's trace.
[[nodiscard]] ResultsTable compare_methods(const ExperimentConfig& cfg, const RunOptions& ro = {});

/// One row per (alpha, policy, seed). Rows are flagged nondominated in
/// (total damage, total transfer cost) within their (policy, seed) group.
[[nodiscard]] ResultsTable sweep_alpha(const ExperimentConfig& cfg, const RunOptions& ro = {});

/// One row per (p_max level, policy, seed) on coupled instances and traces.
[[nodiscard]] ResultsTable sweep_attack(const ExperimentConfig& cfg, const RunOptions& ro = {});

/// One row per (budget fraction, policy, seed) on the same node data.
[[nodiscard]] ResultsTable sweep_resource(const ExperimentConfig& cfg, const RunOptions& ro = {});

struct LearningCurve {
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  /// per_seed_diff[s][t] = un-mean minus kn-mean realized damage in slot t+1.
  std::vector<std::vector<double>> per_seed_diff;
  std::vector<double> mean_diff;
  std::vector<double> mean_abs_diff;
};

[[nodiscard]] LearningCurve learning_curve(const ExperimentConfig& cfg);

/// Runs fn(0..count-1) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// CSV / JSON writers. Numbers use the shortest round-trip representation.
void write_results_csv(std::ostream& out, const ResultsTable& table);
void write_slots_csv(std::ostream& out, const ResultsTable& table);
void write_aggregates(std::ostream& out, const ResultsTable& table, bool as_json);
void write_learning_curve_csv(std::ostream& out, const LearningCurve& curve);
void write_transfers_csv(std::ostream& out, const RunMetrics& metrics, const CostMatrix& costs);

[[nodiscard]] std::string format_number(double x);

}  // namespace rapa

#endif  // RAPA_HARNESS_HPP
