#include "rapa/instance_io.hpp"

#include <fstream>

namespace rapa {

using nlohmann::json;

json instance_to_json(const Instance& inst) {
  json nodes = json::array();
  for (const auto& nd : inst.nodes) {
    nodes.push_back({{"w", nd.weight}, {"r_min", nd.r_min}, {"r_max", nd.r_max}});
  }
  json costs = json::array();
  for (std::size_t i = 0; i < inst.n; ++i) {
    auto row = inst.costs.row(i);
    costs.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  json j;
  j["n"] = inst.n;
  j["T"] = inst.horizon;
  j["R"] = inst.budget;
  j["nodes"] = std::move(nodes);
  j["costs"] = std::move(costs);
  j["attack_probs"] = inst.attack_probs;
  j["seed"] = inst.seed;
  return j;
}

Instance instance_from_json(const json& j) {
  Instance inst;
  try {
    inst.n = j.at("n").get<std::size_t>();
    inst.horizon = j.at("T").get<std::size_t>();
    inst.budget = j.at("R").get<double>();
    inst.seed = j.value("seed", std::uint64_t{0});
    for (const auto& nd : j.at("nodes")) {
      inst.nodes.push_back({nd.at("w").get<double>(), nd.at("r_min").get<double>(),
                            nd.at("r_max").get<double>()});
    }
    const auto& rows = j.at("costs");
    if (rows.size() != inst.n) throw ValidationError("instance: costs must have n rows");
    inst.costs = CostMatrix(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) {
      if (rows[i].size() != inst.n) throw ValidationError("instance: costs must have n columns");
      for (std::size_t k = 0; k < inst.n; ++k) inst.costs(i, k) = rows[i][k].get<double>();
    }
    inst.attack_probs = j.at("attack_probs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance: malformed JSON: ") + e.what());
  }
  inst.validate();
  return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << instance_to_json(inst).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("instance: " + path.string() + ": " + e.what());
  }
  return instance_from_json(j);
}

}  // namespace rapa
