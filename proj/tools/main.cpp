#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qnsk/config.hpp"
#include "qnsk/experiments.hpp"
#include "qnsk/fault_injection.hpp"

using namespace qnsk;

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> filter;
    std::string fault;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "seed for generators and random checks");
    cmd->add_option("--threads", f.threads, "parallel sweep workers")->check(CLI::PositiveNumber);
    cmd->add_option("--filter", f.filter, "check family or name substring");
    // Mutation-test hook; not part of the documented interface.
    cmd->add_option("--inject-fault", f.fault)->group("");
}

bool kind_matches(const std::string& sub, ExperimentKind k) {
    switch (k) {
        case ExperimentKind::simulate:
            return sub == "simulate";
        case ExperimentKind::sweep_delta:
        case ExperimentKind::sweep_eta:
        case ExperimentKind::sweep_drag_ell:
            return sub == "sweep";
        case ExperimentKind::longtime:
            return sub == "longtime";
        case ExperimentKind::korteweg_crosscheck:
            return sub == "korteweg";
        case ExperimentKind::tau:
            return sub == "tau";
        case ExperimentKind::check:
            return sub == "check";
    }
    return false;
}

int dispatch(const std::string& sub, const Flags& f) {
    ExperimentConfig c;
    try {
        if (!f.config.empty()) {
            c = load_config(f.config);
            if (!kind_matches(sub, c.kind)) {
                std::cerr << "config kind '" << to_string(c.kind) << "' does not match subcommand '" << sub << "'\n";
                return kExitBadConfig;
            }
        } else {
            static const std::map<std::string, ExperimentKind> defaults{
                {"simulate", ExperimentKind::simulate}, {"longtime", ExperimentKind::longtime},
                {"tau", ExperimentKind::tau},           {"check", ExperimentKind::check}};
            const auto it = defaults.find(sub);
            if (it == defaults.end()) {
                std::cerr << "'" << sub << "' needs --config\n";
                return kExitBadConfig;
            }
            c.kind = it->second;
        }
        if (f.out) c.out_dir = *f.out;
        if (f.seed) c.seed = c.initial.seed = *f.seed;
        if (f.threads) c.threads = *f.threads;
        if (f.filter) c.filter = *f.filter;
        validate(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    if (!f.fault.empty()) {
        if (f.fault != "korteweg_sign") {
            std::cerr << "unknown fault '" << f.fault << "'\n";
            return kExitBadConfig;
        }
        inject_fault(Fault::korteweg_sign);
    }
    std::cerr << "config_hash " << config_hash(c) << "\n";
    return run_experiment(c, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar quantum Navier-Stokes experiments"};
    app.require_subcommand(1);
    Flags flags;
    const std::pair<const char*, const char*> subs[] = {
        {"simulate", "single solver run"},
        {"sweep", "parameter-limit ladder (delta, eta or drag/ell)"},
        {"longtime", "long-time run with Gaussian moment targets"},
        {"korteweg", "log-NLS / hydrodynamic cross-check ladder"},
        {"tau", "tau ODE table"},
        {"check", "invariant and identity suite"},
    };
    for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help), flags);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadConfig;
    }
    return dispatch(app.get_subcommands().front()->get_name(), flags);
}
