#include "rapa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "rapa/rng.hpp"
#include "rapa/stats.hpp"

namespace rapa {

using nlohmann::json;

namespace {

void check_range(const Range& r, const char* name, bool positive_lo) {
  const bool ok = std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi &&
                  (positive_lo ? r.lo > 0.0 : r.lo >= 0.0);
  if (!ok) {
    throw ValidationError(std::string("config: ") + name + " must be an ordered range [lo, hi] with lo " +
                          (positive_lo ? "> 0" : ">= 0"));
  }
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string("config: ") + name + " must lie in [0, 1]");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n == 0) throw ValidationError("config: n must be at least 1");
  if (horizon == 0) throw ValidationError("config: T must be at least 1");
  if (seeds.empty()) throw ValidationError("config: at least one seed is required");
  (void)RiskParams(alpha);
  for (double a : alphas) (void)RiskParams(a);
  check_probability(p_max, "p_max");
  for (double p : p_max_levels) check_probability(p, "p_max_levels entries");
  check_probability(budget_fraction, "r_fraction");
  for (double f : budget_fractions) check_probability(f, "r_fractions entries");
  check_range(weight_range, "weight_range", false);
  check_range(cost_range, "cost_range", false);
  check_range(r_min_range, "r_min_range", true);
  check_range(r_span_range, "r_span_range", true);
  if (!(tol_bal > 0.0)) throw ValidationError("config: tol_bal must be > 0");
}

EpisodeOptions ExperimentConfig::episode_options() const {
  EpisodeOptions o;
  o.solver.variance_form = variance_form;
  o.solver.exact_max_n = exact_max_n;
  o.tol_bal = tol_bal;
  return o;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  j["experiment_id"] = cfg.experiment_id;
  j["n"] = cfg.n;
  j["T"] = cfg.horizon;
  j["seeds"] = cfg.seeds;
  j["alpha"] = cfg.alpha;
  j["alphas"] = cfg.alphas;
  j["p_max"] = cfg.p_max;
  j["p_max_levels"] = cfg.p_max_levels;
  j["R_mode"] = cfg.budget_mode == BudgetMode::random ? "random" : "fraction";
  j["r_fraction"] = cfg.budget_fraction;
  j["r_fractions"] = cfg.budget_fractions;
  j["weight_range"] = range(cfg.weight_range);
  j["cost_range"] = range(cfg.cost_range);
  j["r_min_range"] = range(cfg.r_min_range);
  j["r_span_range"] = range(cfg.r_span_range);
  json pol = json::array();
  for (auto p : cfg.policies) pol.push_back(std::string(to_string(p)));
  j["policies"] = pol;
  j["variance_form"] = std::string(to_string(cfg.variance_form));
  j["exact_max_n"] = cfg.exact_max_n;
  j["tol_bal"] = cfg.tol_bal;
  j["record_wall_time"] = cfg.record_wall_time;
  return j;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const char* const kKnown[] = {
      "experiment_id", "n", "T", "seeds", "alpha", "alphas", "p_max", "p_max_levels", "R_mode",
      "r_fraction", "r_fractions", "weight_range", "cost_range", "r_min_range", "r_span_range",
      "policies", "variance_form", "exact_max_n", "tol_bal", "record_wall_time", "jobs"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
  try {
    auto range = [&](const char* key, Range& r) {
      if (!j.contains(key)) return;
      const auto& a = j.at(key);
      if (!a.is_array() || a.size() != 2) throw ValidationError(std::string("config: ") + key + " must be [lo, hi]");
      r = {a[0].get<double>(), a[1].get<double>()};
    };
    if (j.contains("experiment_id")) cfg.experiment_id = j.at("experiment_id").get<std::string>();
    if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("T")) cfg.horizon = j.at("T").get<std::size_t>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("p_max")) cfg.p_max = j.at("p_max").get<double>();
    if (j.contains("p_max_levels")) cfg.p_max_levels = j.at("p_max_levels").get<std::vector<double>>();
    if (j.contains("R_mode")) {
      const auto mode = j.at("R_mode").get<std::string>();
      if (mode == "random") {
        cfg.budget_mode = BudgetMode::random;
      } else if (mode == "fraction") {
        cfg.budget_mode = BudgetMode::fraction;
      } else {
        throw ValidationError("config: R_mode must be 'random' or 'fraction'");
      }
    }
    if (j.contains("r_fraction")) cfg.budget_fraction = j.at("r_fraction").get<double>();
    if (j.contains("r_fractions")) cfg.budget_fractions = j.at("r_fractions").get<std::vector<double>>();
    range("weight_range", cfg.weight_range);
    range("cost_range", cfg.cost_range);
    range("r_min_range", cfg.r_min_range);
    range("r_span_range", cfg.r_span_range);
    if (j.contains("policies")) {
      cfg.policies.clear();
      for (const auto& p : j.at("policies")) cfg.policies.push_back(parse_policy(p.get<std::string>()));
    }
    if (j.contains("variance_form")) {
      cfg.variance_form = parse_variance_form(j.at("variance_form").get<std::string>());
    }
    if (j.contains("exact_max_n")) cfg.exact_max_n = j.at("exact_max_n").get<std::size_t>();
    if (j.contains("tol_bal")) cfg.tol_bal = j.at("tol_bal").get<double>();
    if (j.contains("record_wall_time")) cfg.record_wall_time = j.at("record_wall_time").get<bool>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

Instance generate_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const CounterRng weights(seed, "instance.weight");
  const CounterRng r_min(seed, "instance.r_min");
  const CounterRng r_span(seed, "instance.r_span");
  const CounterRng attack_q(seed, "instance.attack_prob");
  const CounterRng costs(seed, "instance.cost");
  const CounterRng budget(seed, "instance.budget");

  Instance inst;
  inst.n = cfg.n;
  inst.horizon = cfg.horizon;
  inst.seed = seed;
  inst.nodes.resize(cfg.n);
  inst.attack_probs.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto& nd = inst.nodes[i];
    nd.weight = weights.uniform(i, cfg.weight_range.lo, cfg.weight_range.hi);
    nd.r_min = r_min.uniform(i, cfg.r_min_range.lo, cfg.r_min_range.hi);
    nd.r_max = nd.r_min + r_span.uniform(i, cfg.r_span_range.lo, cfg.r_span_range.hi);
    inst.attack_probs[i] = cfg.p_max * attack_q.uniform(i);
  }
  inst.costs = CostMatrix(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    for (std::size_t j = 0; j < cfg.n; ++j) {
      if (i != j) inst.costs(i, j) = costs.uniform(i * cfg.n + j, cfg.cost_range.lo, cfg.cost_range.hi);
    }
  }
  const double f = cfg.budget_mode == BudgetMode::random ? budget.uniform(0) : cfg.budget_fraction;
  inst = with_budget_fraction(std::move(inst), f);
  inst.validate();
  return inst;
}

Instance with_budget_fraction(Instance inst, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("budget fraction must lie in [0, 1]");
  const double lo = inst.sum_r_min();
  const double hi = inst.sum_r_max();
  if (f == 0.0) {
    inst.budget = lo;
  } else if (f == 1.0) {
    inst.budget = hi;
  } else {
    inst.budget = lo + f * (hi - lo);
  }
  return inst;
}

AttackTrace sample_attacks(std::span<const double> p, std::size_t horizon, std::uint64_t seed) {
  for (double pi : p) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw ValidationError("attacks: probability outside [0,1]");
  }
  const CounterRng rng(seed, "attacks");
  const std::size_t n = p.size();
  AttackTrace trace(horizon, n);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      trace.set(t, i, rng.uniform(t * n + i) < p[i] ? 1 : 0);
    }
  }
  return trace;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct Level {
  std::string name;  // empty for plain comparisons
  double value = 0.0;
};

struct Job {
  Instance inst;
  AttackTrace trace;
  double alpha = 0.0;
  double p_max = 0.0;
  Level level;
};

std::vector<PolicyId> policies_or(const ExperimentConfig& cfg, std::vector<PolicyId> fallback) {
  return cfg.policies.empty() ? fallback : cfg.policies;
}

// Runs every (job, policy) pair of every seed; output rows follow seed order,
// then job order, then policy order.
ResultsTable run_grid(const ExperimentConfig& cfg, const std::vector<PolicyId>& policies,
                      const RunOptions& ro,
                      const std::function<std::vector<Job>(std::uint64_t seed)>& make_jobs) {
  cfg.validate();
  const EpisodeOptions eo = cfg.episode_options();
  struct SeedOut {
    std::vector<ResultRow> rows;
    std::vector<SlotRow> slots;
  };
  std::vector<SeedOut> out(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t s) {
    const std::uint64_t seed = cfg.seeds[s];
    for (const Job& job : make_jobs(seed)) {
      const RiskParams risk(job.alpha);
      for (PolicyId pid : policies) {
        RunMetrics m = run_episode(job.inst, pid, risk, job.trace, eo);
        ResultRow row;
        row.experiment_id = cfg.experiment_id;
        row.policy = pid;
        row.seed = seed;
        row.n = job.inst.n;
        row.horizon = job.trace.slots();
        row.alpha = job.alpha;
        row.p_max = job.p_max;
        row.budget = job.inst.budget;
        row.total_damage = m.total_damage;
        row.total_transfer_cost = m.total_transfer_cost;
        row.total_epsilon = m.total_epsilon;
        row.wall_seconds = cfg.record_wall_time ? m.wall_seconds : 0.0;
        if (job.level.name == "r_fraction") row.budget_fraction = job.level.value;
        out[s].rows.push_back(row);
        if (ro.keep_slots) {
          for (auto& slot : m.slots) {
            out[s].slots.push_back({cfg.experiment_id, pid, seed, job.alpha, job.p_max, job.inst.budget,
                                    std::move(slot)});
          }
        }
      }
    }
  });

  ResultsTable table;
  table.config = config_to_json(cfg);
  for (auto& so : out) {
    for (auto& r : so.rows) table.rows.push_back(std::move(r));
    for (auto& r : so.slots) table.slot_rows.push_back(std::move(r));
  }
  return table;
}

double level_of(const ResultRow& r, const std::string& name) {
  if (name == "alpha") return r.alpha;
  if (name == "p_max") return r.p_max;
  if (name == "r_fraction") return r.budget_fraction.value_or(0.0);
  return 0.0;
}

// Means over seeds per (policy, level), in order of first appearance.
void aggregate(ResultsTable& table, const std::string& level_name) {
  std::vector<std::pair<PolicyId, double>> keys;
  std::map<std::pair<int, double>, std::vector<const ResultRow*>> groups;
  for (const auto& r : table.rows) {
    const double lv = level_of(r, level_name);
    const auto key = std::make_pair(static_cast<int>(r.policy), lv);
    if (!groups.contains(key)) keys.emplace_back(r.policy, lv);
    groups[key].push_back(&r);
  }
  for (const auto& [pid, lv] : keys) {
    const auto& g = groups[{static_cast<int>(pid), lv}];
    AggregateRow a;
    a.experiment_id = g.front()->experiment_id;
    a.policy = pid;
    a.level_name = level_name;
    a.level = lv;
    a.seeds = g.size();
    for (const ResultRow* r : g) {
      a.mean_damage += r->total_damage;
      a.mean_transfer_cost += r->total_transfer_cost;
      a.mean_epsilon += r->total_epsilon;
      a.mean_wall_seconds += r->wall_seconds;
    }
    const double k = static_cast<double>(g.size());
    a.mean_damage /= k;
    a.mean_transfer_cost /= k;
    a.mean_epsilon /= k;
    a.mean_wall_seconds /= k;
    table.aggregates.push_back(a);
  }
}

}  // namespace

ResultsTable compare_methods(const ExperimentConfig& cfg, const RunOptions& ro) {
  const auto policies = policies_or(cfg, {std::begin(kAllPolicies), std::end(kAllPolicies)});
  auto table = run_grid(cfg, policies, ro, [&](std::uint64_t seed) {
    Job job;
    job.inst = generate_instance(cfg, seed);
    job.trace = sample_attacks(job.inst.attack_probs, cfg.horizon, seed);
    job.alpha = cfg.alpha;
    job.p_max = cfg.p_max;
    return std::vector<Job>{std::move(job)};
  });
  aggregate(table, "");
  return table;
}

ResultsTable sweep_alpha(const ExperimentConfig& cfg, const RunOptions& ro) {
  if (cfg.alphas.empty()) throw ValidationError("sweep-alpha: alpha list is empty");
  const auto policies = policies_or(cfg, {PolicyId::un_mean});
  auto table = run_grid(cfg, policies, ro, [&](std::uint64_t seed) {
    const Instance inst = generate_instance(cfg, seed);
    const AttackTrace trace = sample_attacks(inst.attack_probs, cfg.horizon, seed);
    std::vector<Job> jobs;
    for (double a : cfg.alphas) jobs.push_back({inst, trace, a, cfg.p_max, {"alpha", a}});
    return jobs;
  });

  // Flag nondominated rows within each (policy, seed) group.
  std::map<std::pair<int, std::uint64_t>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    groups[{static_cast<int>(table.rows[k].policy), table.rows[k].seed}].push_back(k);
  }
  for (const auto& [_, idx] : groups) {
    std::vector<double> z1, z2;
    for (std::size_t k : idx) {
      z1.push_back(table.rows[k].total_damage);
      z2.push_back(table.rows[k].total_transfer_cost);
    }
    const auto keep = stats::nondominated(z1, z2);
    for (std::size_t m = 0; m < idx.size(); ++m) table.rows[idx[m]].nondominated = keep[m];
  }

  aggregate(table, "alpha");
  std::map<int, std::vector<std::size_t>> by_policy;
  for (std::size_t k = 0; k < table.aggregates.size(); ++k) {
    by_policy[static_cast<int>(table.aggregates[k].policy)].push_back(k);
  }
  for (const auto& [_, idx] : by_policy) {
    std::vector<double> z1, z2;
    for (std::size_t k : idx) {
      z1.push_back(table.aggregates[k].mean_damage);
      z2.push_back(table.aggregates[k].mean_transfer_cost);
    }
    const auto keep = stats::nondominated(z1, z2);
    for (std::size_t m = 0; m < idx.size(); ++m) table.aggregates[idx[m]].nondominated = keep[m];
  }
  return table;
}

ResultsTable sweep_attack(const ExperimentConfig& cfg, const RunOptions& ro) {
  if (cfg.p_max_levels.empty()) throw ValidationError("sweep-attack: p_max ladder is empty");
  const auto policies = policies_or(cfg, {PolicyId::un_mean, PolicyId::oracle});
  auto table = run_grid(cfg, policies, ro, [&](std::uint64_t seed) {
    std::vector<Job> jobs;
    for (double p : cfg.p_max_levels) {
      ExperimentConfig level_cfg = cfg;
      level_cfg.p_max = p;
      Instance inst = generate_instance(level_cfg, seed);
      AttackTrace trace = sample_attacks(inst.attack_probs, cfg.horizon, seed);
      jobs.push_back({std::move(inst), std::move(trace), cfg.alpha, p, {"p_max", p}});
    }
    return jobs;
  });
  aggregate(table, "p_max");
  return table;
}

ResultsTable sweep_resource(const ExperimentConfig& cfg, const RunOptions& ro) {
  if (cfg.budget_fractions.empty()) throw ValidationError("sweep-resource: fraction ladder is empty");
  const auto policies = policies_or(cfg, {PolicyId::un_mean, PolicyId::oracle});
  auto table = run_grid(cfg, policies, ro, [&](std::uint64_t seed) {
    const Instance base = generate_instance(cfg, seed);
    const AttackTrace trace = sample_attacks(base.attack_probs, cfg.horizon, seed);
    std::vector<Job> jobs;
    for (double f : cfg.budget_fractions) {
      jobs.push_back({with_budget_fraction(base, f), trace, cfg.alpha, cfg.p_max, {"r_fraction", f}});
    }
    return jobs;
  });
  aggregate(table, "r_fraction");
  return table;
}

LearningCurve learning_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  const EpisodeOptions eo = cfg.episode_options();
  LearningCurve curve;
  curve.config = config_to_json(cfg);
  curve.seeds = cfg.seeds;
  curve.per_seed_diff.resize(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t s) {
    const Instance inst = generate_instance(cfg, cfg.seeds[s]);
    const AttackTrace trace = sample_attacks(inst.attack_probs, cfg.horizon, cfg.seeds[s]);
    const RiskParams risk(cfg.alpha);
    const auto un = un_mean_policy(inst, risk, trace, eo);
    const auto kn = kn_mean_policy(inst, risk, trace, eo);
    auto& diff = curve.per_seed_diff[s];
    diff.resize(trace.slots());
    for (std::size_t t = 0; t < trace.slots(); ++t) {
      diff[t] = un.slots[t].realized_damage - kn.slots[t].realized_damage;
    }
  });
  curve.mean_diff.assign(cfg.horizon, 0.0);
  curve.mean_abs_diff.assign(cfg.horizon, 0.0);
  const double k = static_cast<double>(cfg.seeds.size());
  for (const auto& diff : curve.per_seed_diff) {
    for (std::size_t t = 0; t < diff.size(); ++t) {
      curve.mean_diff[t] += diff[t] / k;
      curve.mean_abs_diff[t] += std::abs(diff[t]) / k;
    }
  }
  return curve;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

void write_config_header(std::ostream& out, const json& config) {
  out << "# config: " << config.dump() << '\n';
}

}  // namespace

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  write_config_header(out, table.config);
  const bool has_fraction = std::any_of(table.rows.begin(), table.rows.end(),
                                        [](const ResultRow& r) { return r.budget_fraction.has_value(); });
  const bool has_flag = std::any_of(table.rows.begin(), table.rows.end(),
                                    [](const ResultRow& r) { return r.nondominated.has_value(); });
  out << "experiment_id,policy,seed,n,T,alpha,p_max,R,total_damage,total_transfer_cost,total_epsilon,"
         "wall_seconds";
  if (has_fraction) out << ",r_fraction";
  if (has_flag) out << ",nondominated";
  out << '\n';
  for (const auto& r : table.rows) {
    out << r.experiment_id << ',' << to_string(r.policy) << ',' << r.seed << ',' << r.n << ','
        << r.horizon << ',' << format_number(r.alpha) << ',' << format_number(r.p_max) << ','
        << format_number(r.budget) << ',' << format_number(r.total_damage) << ','
        << format_number(r.total_transfer_cost) << ',' << format_number(r.total_epsilon) << ','
        << format_number(r.wall_seconds);
    if (has_fraction) out << ',' << format_number(r.budget_fraction.value_or(0.0));
    if (has_flag) out << ',' << (r.nondominated.value_or(false) ? 1 : 0);
    out << '\n';
  }
}

void write_slots_csv(std::ostream& out, const ResultsTable& table) {
  write_config_header(out, table.config);
  out << "experiment_id,policy,seed,alpha,p_max,R,t,damage,transfer_cost,epsilon,mean_err_max,"
         "var_err_max\n";
  for (const auto& r : table.slot_rows) {
    const auto& s = r.slot;
    out << r.experiment_id << ',' << to_string(r.policy) << ',' << r.seed << ','
        << format_number(r.alpha) << ',' << format_number(r.p_max) << ',' << format_number(r.budget)
        << ',' << s.t << ',' << format_number(s.realized_damage) << ','
        << format_number(s.transfer_cost) << ',' << (s.has_epsilon ? format_number(s.epsilon) : "")
        << ',' << (s.has_belief ? format_number(s.mean_err_max) : "") << ','
        << (s.has_belief ? format_number(s.var_err_max) : "") << '\n';
  }
}

void write_aggregates(std::ostream& out, const ResultsTable& table, bool as_json) {
  const bool has_flag = std::any_of(table.aggregates.begin(), table.aggregates.end(),
                                    [](const AggregateRow& a) { return a.nondominated.has_value(); });
  if (as_json) {
    json rows = json::array();
    for (const auto& a : table.aggregates) {
      json r = {{"experiment_id", a.experiment_id},
                {"policy", std::string(to_string(a.policy))},
                {"seeds", a.seeds},
                {"mean_damage", a.mean_damage},
                {"mean_transfer_cost", a.mean_transfer_cost},
                {"mean_epsilon", a.mean_epsilon},
                {"mean_wall_seconds", a.mean_wall_seconds}};
      if (!a.level_name.empty()) r[a.level_name] = a.level;
      if (a.nondominated) r["nondominated"] = *a.nondominated;
      rows.push_back(std::move(r));
    }
    out << json{{"config", table.config}, {"aggregates", rows}}.dump(2) << '\n';
    return;
  }
  const std::string level = table.aggregates.empty() ? "" : table.aggregates.front().level_name;
  out << "experiment_id,policy";
  if (!level.empty()) out << ',' << level;
  out << ",seeds,mean_damage,mean_transfer_cost,mean_epsilon,mean_wall_seconds";
  if (has_flag) out << ",nondominated";
  out << '\n';
  for (const auto& a : table.aggregates) {
    out << a.experiment_id << ',' << to_string(a.policy);
    if (!level.empty()) out << ',' << format_number(a.level);
    out << ',' << a.seeds << ',' << format_number(a.mean_damage) << ','
        << format_number(a.mean_transfer_cost) << ',' << format_number(a.mean_epsilon) << ','
        << format_number(a.mean_wall_seconds);
    if (has_flag) out << ',' << (a.nondominated.value_or(false) ? 1 : 0);
    out << '\n';
  }
}

void write_learning_curve_csv(std::ostream& out, const LearningCurve& curve) {
  write_config_header(out, curve.config);
  out << "experiment_id,t,seeds,mean_damage_diff,mean_abs_damage_diff\n";
  const std::string id = curve.config.value("experiment_id", std::string{});
  for (std::size_t t = 0; t < curve.mean_diff.size(); ++t) {
    out << id << ',' << t + 1 << ',' << curve.seeds.size() << ',' << format_number(curve.mean_diff[t])
        << ',' << format_number(curve.mean_abs_diff[t]) << '\n';
  }
}

void write_transfers_csv(std::ostream& out, const RunMetrics& metrics, const CostMatrix& costs) {
  out << "t,i,j,amount,cost\n";
  for (const auto& slot : metrics.slots) {
    for (const auto& f : slot.plan.flows) {
      out << slot.t << ',' << f.from << ',' << f.to << ',' << format_number(f.amount) << ','
          << format_number(costs(f.from, f.to) * f.amount) << '\n';
    }
  }
}

}  // namespace rapa
