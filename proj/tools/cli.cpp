#include "cli.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rapa/harness.hpp"
#include "rapa/instance_io.hpp"

namespace rapa::cli {
namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> experiment_id;
  std::optional<std::size_t> n;
  std::optional<std::size_t> horizon;
  std::optional<double> alpha;
  std::vector<double> alphas;
  std::optional<double> p_max;
  std::vector<double> p_max_levels;
  std::optional<double> r_fraction;
  std::vector<double> r_fractions;
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::optional<std::size_t> seed_count;
  std::vector<std::string> policies;
  std::optional<std::string> variance_form;
  std::optional<std::size_t> jobs;
  bool no_wall_time = false;

  std::string out_path;
  std::string per_slot_path;
  std::string transfers_path;
  std::string instance_path;
  std::string format = "csv";
};

void add_common(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config_path, "JSON experiment config; flags override its fields")
      ->check(CLI::ExistingFile);
  sub.add_option("--experiment-id", o.experiment_id, "Value of the experiment_id column");
  sub.add_option("--n", o.n, "Number of nodes")->check(CLI::PositiveNumber);
  sub.add_option("--t", o.horizon, "Number of slots T")->check(CLI::PositiveNumber);
  sub.add_option("--alpha", o.alpha, "Risk parameter in (0, 1)");
  sub.add_option("--p-max", o.p_max, "Attack probability cap; p_i ~ U(0, p_max)");
  sub.add_option("--r-fraction", o.r_fraction,
                 "Fix R at this fraction of [sum r_min, sum r_max] instead of drawing it");
  sub.add_option("--seed", o.seed, "Seed (first seed when --seeds is given)")
      ->each([&o](const std::string&) { o.seed_given = true; });
  sub.add_option("--seeds", o.seed_count, "Run seeds seed, seed+1, ..., seed+N-1")
      ->check(CLI::PositiveNumber);
  sub.add_option("--variance-form", o.variance_form, "Surrogate variance term: paper or squared")
      ->check(CLI::IsMember({"paper", "squared"}));
  sub.add_option("--jobs", o.jobs, "Worker threads (0 = available parallelism)");
  sub.add_flag("--no-wall-time", o.no_wall_time, "Write wall_seconds as 0 for byte-stable output");
}

ExperimentConfig effective_config(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
  if (o.experiment_id) cfg.experiment_id = *o.experiment_id;
  if (o.n) cfg.n = *o.n;
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.alpha) cfg.alpha = *o.alpha;
  if (!o.alphas.empty()) cfg.alphas = o.alphas;
  if (o.p_max) cfg.p_max = *o.p_max;
  if (!o.p_max_levels.empty()) cfg.p_max_levels = o.p_max_levels;
  if (o.r_fraction) {
    cfg.budget_mode = BudgetMode::fraction;
    cfg.budget_fraction = *o.r_fraction;
  }
  if (!o.r_fractions.empty()) cfg.budget_fractions = o.r_fractions;
  if (o.seed_count) {
    cfg.seeds.clear();
    for (std::size_t k = 0; k < *o.seed_count; ++k) cfg.seeds.push_back(o.seed + k);
  } else if (o.seed_given) {
    cfg.seeds = {o.seed};
  }
  if (!o.policies.empty()) {
    cfg.policies.clear();
    for (const auto& p : o.policies) cfg.policies.push_back(parse_policy(p));
  }
  if (o.variance_form) cfg.variance_form = parse_variance_form(*o.variance_form);
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.no_wall_time) cfg.record_wall_time = false;
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

// Rows go to --out, or to `out` when no path is given; aggregates follow on `out`.
void emit_table(const ResultsTable& table, const Overrides& o, std::ostream& out) {
  if (o.out_path.empty()) {
    write_results_csv(out, table);
  } else {
    auto f = open_output(o.out_path);
    write_results_csv(f, table);
    finish(f, o.out_path);
  }
  if (!o.per_slot_path.empty()) {
    auto f = open_output(o.per_slot_path);
    write_slots_csv(f, table);
    finish(f, o.per_slot_path);
  }
  if (!o.out_path.empty()) write_aggregates(out, table, o.format == "json");
}

int cmd_generate(const Overrides& o, std::ostream& out) {
  const ExperimentConfig cfg = effective_config(o);
  const Instance inst = generate_instance(cfg, cfg.seeds.front());
  if (o.out_path.empty()) {
    out << instance_to_json(inst).dump(2) << '\n';
  } else {
    save_instance(inst, o.out_path);
  }
  return 0;
}

int cmd_run(const Overrides& o, std::ostream& out) {
  ExperimentConfig cfg = effective_config(o);
  if (o.policies.size() > 1) throw ValidationError("run: give a single --policy");
  const PolicyId pid = cfg.policies.empty() ? PolicyId::un_mean : cfg.policies.front();
  std::uint64_t seed = cfg.seeds.front();
  Instance inst;
  if (o.instance_path.empty()) {
    inst = generate_instance(cfg, seed);
  } else {
    inst = load_instance(o.instance_path);
    inst.validate();
    // The attack trace follows the instance's own seed unless one is given.
    if (!o.seed_given && !o.seed_count) seed = inst.seed;
    cfg.n = inst.n;
    cfg.horizon = inst.horizon;
  }
  const AttackTrace trace = sample_attacks(inst.attack_probs, inst.horizon, seed);
  const RunMetrics m = run_episode(inst, pid, RiskParams(cfg.alpha), trace, cfg.episode_options());

  ResultsTable table;
  cfg.policies = {pid};
  cfg.seeds = {seed};
  table.config = config_to_json(cfg);
  if (!o.instance_path.empty()) table.config["instance"] = o.instance_path;
  ResultRow row;
  row.experiment_id = cfg.experiment_id;
  row.policy = pid;
  row.seed = seed;
  row.n = inst.n;
  row.horizon = trace.slots();
  row.alpha = cfg.alpha;
  row.p_max = cfg.p_max;
  row.budget = inst.budget;
  row.total_damage = m.total_damage;
  row.total_transfer_cost = m.total_transfer_cost;
  row.total_epsilon = m.total_epsilon;
  row.wall_seconds = cfg.record_wall_time ? m.wall_seconds : 0.0;
  table.rows.push_back(row);
  for (const auto& s : m.slots) {
    table.slot_rows.push_back({cfg.experiment_id, pid, seed, cfg.alpha, cfg.p_max, inst.budget, s});
  }
  table.aggregates.push_back({cfg.experiment_id, pid, "", 0.0, 1, m.total_damage, m.total_transfer_cost,
                              m.total_epsilon, row.wall_seconds, std::nullopt});
  if (!o.transfers_path.empty()) {
    auto f = open_output(o.transfers_path);
    write_transfers_csv(f, m, inst.costs);
    finish(f, o.transfers_path);
  }
  emit_table(table, o, out);
  return 0;
}

int cmd_table(const Overrides& o, std::ostream& out,
              ResultsTable (*fn)(const ExperimentConfig&, const RunOptions&)) {
  const ExperimentConfig cfg = effective_config(o);
  RunOptions ro;
  ro.keep_slots = !o.per_slot_path.empty();
  emit_table(fn(cfg, ro), o, out);
  return 0;
}

int cmd_learning_curve(const Overrides& o, std::ostream& out) {
  const ExperimentConfig cfg = effective_config(o);
  const LearningCurve curve = learning_curve(cfg);
  if (o.out_path.empty()) {
    write_learning_curve_csv(out, curve);
  } else {
    auto f = open_output(o.out_path);
    write_learning_curve_csv(f, curve);
    finish(f, o.out_path);
  }
  return 0;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-phase resource allocation under unknown attacks: simulator and experiment runner",
               "rapa"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Overrides o;
  std::function<int()> action;

  auto* gen = app.add_subcommand("generate", "Draw one instance and write it as JSON");
  add_common(*gen, o);
  gen->add_option("--out", o.out_path, "Instance JSON path (stdout if omitted)");
  gen->callback([&] { action = [&] { return cmd_generate(o, out); }; });

  auto* run = app.add_subcommand("run", "Run one policy on one instance and seed");
  add_common(*run, o);
  run->add_option("--policy", o.policies, "un-mean, kn-mean, greedy or oracle (default un-mean)")
      ->expected(1);
  run->add_option("--instance", o.instance_path, "Instance JSON from `generate`")->check(CLI::ExistingFile);
  run->add_option("--out", o.out_path, "Results CSV path (stdout if omitted)");
  run->add_option("--per-slot", o.per_slot_path, "Per-slot CSV path");
  run->add_option("--transfers", o.transfers_path, "Transfer list CSV path");
  run->add_option("--format", o.format, "Aggregate table format")->check(CLI::IsMember({"csv", "json"}));
  run->callback([&] { action = [&] { return cmd_run(o, out); }; });

  struct TableCommand {
    const char* name;
    const char* help;
    ResultsTable (*fn)(const ExperimentConfig&, const RunOptions&);
  };
  const TableCommand tables[] = {
      {"compare", "All policies on every seed with shared traces", &compare_methods},
      {"sweep-alpha", "Damage and transfer cost over a list of risk levels", &sweep_alpha},
      {"sweep-attack", "Damage over a ladder of attack probability caps", &sweep_attack},
      {"sweep-resource", "Damage over a ladder of budget fractions", &sweep_resource},
  };
  for (const auto& tc : tables) {
    auto* sub = app.add_subcommand(tc.name, tc.help);
    add_common(*sub, o);
    sub->add_option("--policy", o.policies, "Policies to run (repeatable; default depends on subcommand)");
    sub->add_option("--out", o.out_path, "Results CSV path (stdout if omitted, without aggregates)");
    sub->add_option("--per-slot", o.per_slot_path, "Per-slot CSV path");
    sub->add_option("--format", o.format, "Aggregate table format on stdout")
        ->check(CLI::IsMember({"csv", "json"}));
    if (std::string(tc.name) == "sweep-alpha") {
      sub->add_option("--alphas", o.alphas, "Risk levels to sweep")->delimiter(',');
    } else if (std::string(tc.name) == "sweep-attack") {
      sub->add_option("--p-max-levels", o.p_max_levels, "Attack probability caps to sweep")->delimiter(',');
    } else if (std::string(tc.name) == "sweep-resource") {
      sub->add_option("--r-fractions", o.r_fractions, "Budget fractions to sweep")->delimiter(',');
    }
    auto fn = tc.fn;
    sub->callback([&, fn] { action = [&, fn] { return cmd_table(o, out, fn); }; });
  }

  auto* lc = app.add_subcommand("learning-curve", "Per-slot un-mean minus kn-mean damage, averaged over seeds");
  add_common(*lc, o);
  lc->add_option("--out", o.out_path, "Curve CSV path (stdout if omitted)");
  lc->callback([&] { action = [&] { return cmd_learning_curve(o, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    return action ? action() : 1;
  } catch (const InfeasibleError& e) {
    err << "rapa: infeasible: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "rapa: invalid input: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "rapa: error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace rapa::cli
