#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wfshape/baselines.hpp"
#include "wfshape/regulator.hpp"
#include "wfshape/trace.hpp"

namespace wfshape {

struct NoDefense {
    friend bool operator==(const NoDefense&, const NoDefense&) = default;
};

/// A configured defense. Dispatches to the matching simulator.
class Defense {
public:
    using Config = std::variant<NoDefense, RegulatorParams, FrontParams, TamarawParams>;

    Defense() = default;
    Defense(std::string name, Config config) : name_(std::move(name)), config_(config) {}

    const std::string& name() const { return name_; }
    const Config& config() const { return config_; }
    bool randomized() const;

    DefendedTrace apply(const Trace& trace, std::uint64_t seed) const;

private:
    std::string name_ = "none";
    Config config_ = NoDefense{};
};

/// Names: none, regulator-heavy, regulator-light, front-1700, front-2500, tamaraw.
std::optional<Defense> find_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Every packet passes through as Real at its original time.
DefendedTrace identity_defense(const Trace& trace);

/// Applies the defense to every trace; trace i uses derive_seed(seed, trace name or i).
std::vector<DefendedTrace> defend_dataset(const Dataset& dataset, const Defense& defense,
                                          std::uint64_t seed, unsigned jobs = 1);

/// Per-trace seed: keyed by the trace's file name when it has one, else by index.
std::uint64_t trace_seed(std::uint64_t seed, const Trace& trace, std::size_t index);

}  // namespace wfshape
