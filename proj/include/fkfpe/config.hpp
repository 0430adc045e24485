#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fkfpe/grid.hpp"
#include "fkfpe/potential.hpp"

namespace fkfpe {

enum class SchemeMode { Full, TransportOnly, Homogeneous };

enum class TruncationPolicy { Coupled, Fixed };  // coupled: R = h^{-1/2}

struct SchemeConfig {
    double s = 1.0;             // fractional exponent in (0,1]
    double h = 0.125;           // time step
    double T = 1.0;             // horizon, T = N h
    TruncationPolicy trunc = TruncationPolicy::Coupled;
    double R_fixed = 0.0;       // used when trunc == Fixed
    GridGeom grid;
    double p = 2.0;             // Lp diagnostic exponent
    double alpha = 0.0;         // Lp decay rate, must exceed ||D^2 Psi||_inf
    uint64_t seed = 0;
    SchemeMode mode = SchemeMode::Full;

    // runner extras resolved from the config file
    std::string potential = "quadratic";
    double potential_scale = 1.0;
    double f0_x0 = 0.0, f0_v0 = 0.0, f0_sx = 0.35, f0_sv = 0.3;

    int steps() const;
    double R() const { return trunc == TruncationPolicy::Coupled ? 1.0 / std::sqrt(h) : R_fixed; }
    Potential make_psi() const { return make_potential(potential, grid.Lv, potential_scale); }

    /// Checks invariants (s range, T = N h, alpha vs Hessian bound). Throws on violation.
    void validate() const;
};

struct ConfigError {
    int line;             // 0 when not tied to a line
    std::string message;
};

/// Parses the flat key=value config format. Unknown keys are hard errors.
/// Throws ConfigError on malformed input.
SchemeConfig parse_config_text(const std::string& text);
SchemeConfig load_config(const std::string& path);

/// Canonical key=value rendering (used for manifests and the config hash).
std::string render_config(const SchemeConfig& c);
uint64_t config_hash(const SchemeConfig& c);

extern const char* const kToolVersion;

}  // namespace fkfpe
