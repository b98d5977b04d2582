#pragma once

#include <cstdint>

#include "wfshape/trace.hpp"

namespace wfshape {

/// FRONT-style front padding: each side draws a dummy count and a Rayleigh
/// window, then scatters that many dummies from t=0. Real packets are untouched.
struct FrontParams {
    std::uint64_t server_max = 2500;  // N_s, download dummies
    std::uint64_t client_max = 2500;  // N_c, upload dummies
    double window_min = 1.0;          // W_min, seconds
    double window_max = 14.0;         // W_max, seconds

    void validate() const;
    friend bool operator==(const FrontParams&, const FrontParams&) = default;
};

/// Tamaraw-style constant-rate regularization with pad-to-multiple.
struct TamarawParams {
    double upload_interval = 0.04;     // rho_out, seconds per upload slot
    double download_interval = 0.012;  // rho_in, seconds per download slot
    std::uint64_t pad_multiple = 100;  // L

    void validate() const;
    friend bool operator==(const TamarawParams&, const TamarawParams&) = default;
};

FrontParams front_1700();
FrontParams front_2500();
TamarawParams tamaraw_default();

DefendedTrace apply_front(const Trace& trace, const FrontParams& params, std::uint64_t seed);
DefendedTrace apply_tamaraw(const Trace& trace, const TamarawParams& params);

}  // namespace wfshape
