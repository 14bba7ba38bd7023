#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qnsk/initial_data.hpp"
#include "qnsk/params.hpp"

namespace qnsk {

constexpr int kSchemaVersion = 1;

enum class ExperimentKind { simulate, sweep_delta, sweep_eta, sweep_drag_ell, longtime, korteweg_crosscheck, tau, check };
const char* to_string(ExperimentKind k);

struct GridSpec {
    int d = 1;
    double ell = 5.0;
    int n = 128;
};

struct Truncation {
    bool enabled = false;
    /// Negative values select 1/ell.
    double theta = -1.0;
    double iota = -1.0;
};

/// Parameters used when a document omits them: nu = eps = 0.5, everything else off.
inline ParamSet default_params() {
    ParamSet p;
    p.nu = 0.5;
    p.eps = 0.5;
    return p;
}

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ExperimentKind kind = ExperimentKind::simulate;
    GridSpec grid;
    ParamSet params = default_params();
    GeneratorSpec initial;
    Truncation truncation;
    double t_end = 1.0;
    int snapshot_every = 0;
    int diag_every = 0;
    /// Sweep axis values (delta, eta or ell), strictly monotone.
    std::vector<double> ladder;
    /// Cross-check refinement ladder, one (dt, delta_stab) pair per rung.
    std::vector<double> dt_ladder;
    std::vector<double> delta_ladder;
    /// tau experiment horizon and tolerance.
    double tau_t_max = 100.0;
    double tau_rel_tol = 1e-10;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string filter;
};

/// Grid size of an ell-sweep point: same spacing as `base`, rounded to an even count.
int sweep_grid_n(const GridSpec& base, double ell);

/// Throws ConfigError on malformed documents, unknown keys or failed invariants.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical document (sorted keys, every field present).
std::string dump_config(const ExperimentConfig& c);
/// FNV-1a 64 of the canonical document, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

}  // namespace qnsk
