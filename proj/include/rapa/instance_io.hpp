#ifndef RAPA_INSTANCE_IO_HPP
#define RAPA_INSTANCE_IO_HPP

#include <filesystem>
#include <string>

#include "json.hpp"
#include "rapa/model.hpp"

namespace rapa {

// JSON layout: {n, T, R, nodes:[{w, r_min, r_max}], costs:[[...]], attack_probs:[...], seed}

[[nodiscard]] nlohmann::json instance_to_json(const Instance& inst);

/// Parses and validates; throws ValidationError / InfeasibleError.
[[nodiscard]] Instance instance_from_json(const nlohmann::json& j);

void save_instance(const Instance& inst, const std::filesystem::path& path);
[[nodiscard]] Instance load_instance(const std::filesystem::path& path);

}  // namespace rapa

#endif  // RAPA_INSTANCE_IO_HPP
