#include "wfshape/defense.hpp"

#include "wfshape/parallel.hpp"
#include "wfshape/rng.hpp"

namespace wfshape {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool Defense::randomized() const {
    return std::holds_alternative<RegulatorParams>(config_) ||
           std::holds_alternative<FrontParams>(config_);
}

DefendedTrace Defense::apply(const Trace& trace, std::uint64_t seed) const {
    return std::visit(
        overloaded{
            [&](const NoDefense&) { return identity_defense(trace); },
            [&](const RegulatorParams& p) { return apply_regulator(trace, p, seed); },
            [&](const FrontParams& p) { return apply_front(trace, p, seed); },
            [&](const TamarawParams& p) { return apply_tamaraw(trace, p); },
        },
        config_);
}

std::optional<Defense> find_preset(std::string_view name) {
    if (name == "none") return Defense("none", NoDefense{});
    if (name == "regulator-heavy") return Defense("regulator-heavy", regulator_heavy());
    if (name == "regulator-light") return Defense("regulator-light", regulator_light());
    if (name == "front-1700") return Defense("front-1700", front_1700());
    if (name == "front-2500") return Defense("front-2500", front_2500());
    if (name == "tamaraw") return Defense("tamaraw", tamaraw_default());
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    return {"none", "regulator-heavy", "regulator-light", "front-1700", "front-2500", "tamaraw"};
}

DefendedTrace identity_defense(const Trace& trace) {
    DefendedTrace out;
    out.packets.reserve(trace.size());
    for (const auto& p : trace.packets)
        out.packets.push_back({p.time, p.direction, PacketKind::Real, p.time});
    return out;
}

std::uint64_t trace_seed(std::uint64_t seed, const Trace& trace, std::size_t index) {
    return trace.name.empty() ? derive_seed(seed, static_cast<std::uint64_t>(index))
                              : derive_seed(seed, trace.name);
}

std::vector<DefendedTrace> defend_dataset(const Dataset& dataset, const Defense& defense,
                                          std::uint64_t seed, unsigned jobs) {
    std::vector<DefendedTrace> out(dataset.size());
    parallel_for(dataset.size(), jobs, [&](std::size_t i) {
        const auto& trace = dataset.traces[i];
        out[i] = defense.apply(trace, trace_seed(seed, trace, i));
    });
    return out;
}

}  // namespace wfshape
