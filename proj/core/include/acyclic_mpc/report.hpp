#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "acyclic_mpc/engine.hpp"

namespace acyclic_mpc {

struct RunInfo {
    std::size_t machines = 1;
    std::optional<std::uint64_t> seed;
    EngineConfig config;
    std::optional<bool> verified;  ///< set when an oracle check ran
};

/// Deterministic run report. Keys keep insertion order; see README for
/// the schema.
nlohmann::ordered_json make_report(const Instance& q, const HyperedgeTree& tree, const EngineResult& r,
                                   const RunInfo& info);

/// Two-space indented text with a trailing newline.
std::string dump_report(const nlohmann::ordered_json& report);

}  // namespace acyclic_mpc
