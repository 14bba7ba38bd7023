#include "qnsk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "qnsk/checks.hpp"
#include "qnsk/lognls_solver.hpp"
#include "qnsk/snapshot.hpp"

namespace qnsk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json base_meta(const ExperimentConfig& c) {
    return json{{"config_hash", config_hash(c)}, {"kind", to_string(c.kind)}, {"schema_version", kSchemaVersion}};
}

json column_docs() {
    json j = json::object();
    for (const auto& [k, v] : record_column_docs()) j[k] = v;
    return j;
}

std::string diagnostics_csv(const ExperimentConfig& c, const std::vector<DiagnosticsRecord>& records) {
    json meta = base_meta(c);
    meta["columns"] = column_docs();
    std::vector<std::vector<double>> rows;
    for (const auto& r : records) rows.push_back(record_values(r));
    return csv_document(meta.dump(), record_columns(), rows);
}

double resolve(double v, double ell) { return v > 0.0 ? v : 1.0 / ell; }

/// Writes diagnostics, snapshots and metadata of one solver run into dir.
json emit_run(const ExperimentConfig& c, const fs::path& dir, const Trajectory& tr, const json& extra) {
    fs::create_directories(dir);
    write_text(dir / "diagnostics.csv", diagnostics_csv(c, tr.records));
    json snaps = json::array();
    for (size_t k = 0; k < tr.snapshots.size(); ++k) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "snap_%04zu", k);
        const FluidState& s = tr.snapshots[k].state;
        write_snapshot(snapshot_path(dir, stem, "sqrtR"), s.sqrtR, tr.snapshots[k].t);
        snaps.push_back(snapshot_path(fs::path{}, stem, "sqrtR").string());
        for (int a = 0; a < s.Lambda.dim(); ++a) {
            const std::string name = "Lambda" + std::to_string(a);
            write_snapshot(snapshot_path(dir, stem, name), s.Lambda[a], tr.snapshots[k].t);
            snaps.push_back(snapshot_path(fs::path{}, stem, name).string());
        }
    }
    json meta = base_meta(c);
    meta["config"] = json::parse(dump_config(c));
    meta["status"] = to_string(tr.status);
    meta["message"] = tr.message;
    meta["steps"] = tr.steps;
    meta["t_last"] = tr.t_last;
    meta["velocity_floor"] = tr.floor;
    meta["min_density"] = tr.min_density;
    meta["snapshots"] = snaps;
    meta["artifacts"] = {"diagnostics.csv"};
    for (const auto& [k, v] : extra.items()) meta[k] = v;
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    return meta;
}

RunOptions run_options(const ExperimentConfig& c) {
    RunOptions o;
    o.t_end = c.t_end;
    o.snapshot_every = c.snapshot_every;
    o.diag_every = c.diag_every;
    return o;
}

double mass_drift(const Trajectory& tr) {
    if (tr.records.empty()) return 0.0;
    const double m0 = tr.records.front().mass;
    double worst = 0.0;
    for (const auto& r : tr.records) worst = std::max(worst, std::abs(r.mass - m0) / m0);
    return worst;
}

int simulate(const ExperimentConfig& c, std::ostream& log) {
    const Grid g(c.grid.d, c.grid.ell, c.grid.n);
    const FluidState s0 = initial_state(c, g);
    const Trajectory tr = run(s0, c.params, run_options(c));
    const double drift = mass_drift(tr);
    emit_run(c, c.out_dir, tr, json{{"mass_drift", drift}});
    log << "simulate: " << to_string(tr.status) << " steps=" << tr.steps << " t=" << tr.t_last
        << " mass_drift=" << drift << "\n";
    if (tr.status != RunStatus::completed) return kExitRunFailure;
    return drift <= 1e-8 ? kExitOk : kExitInvariant;
}

int sweep(const ExperimentConfig& c, std::ostream& log) {
    const std::vector<SweepRow> rows = run_sweep(c);
    json meta = base_meta(c);
    meta["axis"] = c.kind == ExperimentKind::sweep_delta ? "delta" : c.kind == ExperimentKind::sweep_eta ? "eta" : "ell";
    std::vector<std::string> cols{"axis", "completed", "t", "mass", "energy", "energy_reg", "bd_entropy",
                                  "relative_entropy", "min_density"};
    std::vector<std::vector<double>> table;
    bool failed = false;
    json statuses = json::array();
    for (const auto& r : rows) {
        const DiagnosticsRecord& f = r.final;
        table.push_back({r.axis, r.status == RunStatus::completed ? 1.0 : 0.0, f.t, f.mass, f.energy, f.energy_reg,
                         f.bd_entropy, f.relative_entropy, f.min_density});
        statuses.push_back({{"axis", r.axis}, {"status", to_string(r.status)}, {"message", r.message}});
        failed = failed || r.status != RunStatus::completed;
        log << "sweep " << meta["axis"].get<std::string>() << "=" << r.axis << ": " << to_string(r.status) << "\n";
    }
    meta["runs"] = statuses;
    std::string doc = csv_document(meta.dump(), cols, table);
    // Trailing block: differences between consecutive ladder points.
    doc += "\naxis_a,axis_b,l2_density_difference,energy_difference\n";
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        const bool ok = a.status == RunStatus::completed && b.status == RunStatus::completed;
        doc += fmt(a.axis) + "," + fmt(b.axis) + "," + (ok ? fmt(overlap_l2_distance(a.R, b.R)) : "nan") + "," +
               (ok ? fmt(std::abs(a.final.energy - b.final.energy)) : "nan") + "\n";
    }
    write_text(fs::path(c.out_dir) / "sweep.csv", doc);
    return failed ? kExitRunFailure : kExitOk;
}

int longtime(const ExperimentConfig& c, std::ostream& log) {
    const Grid g(c.grid.d, c.grid.ell, c.grid.n);
    const FluidState s0 = initial_state(c, g);
    RunOptions o = run_options(c);
    if (o.snapshot_every == 0) o.snapshot_every = c.diag_every;
    const Trajectory tr = run(s0, c.params, o);
    const ScalarField G = mass_matched_gaussian(g, s0.mass());
    const double gm = integrate(G), g1 = moment(G, Weight::y), g2 = moment(G, Weight::r2);
    std::vector<std::vector<double>> rows;
    for (const auto& f : tr.snapshots) {
        const ScalarField R = f.state.density();
        const double m2 = moment(R, Weight::r2);
        rows.push_back({f.t, integrate(R), moment(R, Weight::y), m2, gm, g1, g2, std::abs(m2 - g2) / g2});
    }
    json meta = base_meta(c);
    meta["gaussian_mass"] = gm;
    meta["gaussian_second_moment"] = g2;
    const std::string doc = csv_document(meta.dump(),
                                         {"t", "mass", "first_moment", "second_moment", "target_mass",
                                          "target_first_moment", "target_second_moment", "second_moment_rel_err"},
                                         rows);
    emit_run(c, c.out_dir, tr, json{{"moments", "moments.csv"}});
    write_text(fs::path(c.out_dir) / "moments.csv", doc);
    log << "longtime: " << to_string(tr.status) << " t=" << tr.t_last << "\n";
    return tr.status == RunStatus::completed ? kExitOk : kExitRunFailure;
}

int crosscheck(const ExperimentConfig& c, std::ostream& log) {
    const Grid g(c.grid.d, c.grid.ell, c.grid.n);
    const WaveFunction psi = generate_wave(g, c.initial, c.params.eps > 0.0 ? c.params.eps : 1.0);
    std::vector<std::vector<double>> rows;
    json runs = json::array();
    bool failed = false;
    for (size_t i = 0; i < c.dt_ladder.size(); ++i) {
        CrosscheckPolicy pol;
        pol.dt = c.dt_ladder[i];
        pol.delta_stab = c.delta_ladder[i];
        pol.c_cfl = c.params.dt.c_cfl;
        const CrosscheckReport r = nls_to_hydro_crosscheck(psi, c.t_end, pol);
        rows.push_back({pol.dt, pol.delta_stab, r.ok ? 1.0 : 0.0, r.difference, r.mass_nls, r.mass_hydro,
                        r.mass_initial});
        runs.push_back({{"dt", pol.dt}, {"delta_stab", pol.delta_stab}, {"status", r.status}});
        failed = failed || !r.ok;
        log << "crosscheck dt=" << pol.dt << " delta_stab=" << pol.delta_stab << ": " << r.status
            << " difference=" << r.difference << "\n";
    }
    json meta = base_meta(c);
    meta["runs"] = runs;
    write_text(fs::path(c.out_dir) / "crosscheck.csv",
               csv_document(meta.dump(),
                            {"dt", "delta_stab", "completed", "difference", "mass_nls", "mass_hydro", "mass_initial"},
                            rows));
    return failed ? kExitRunFailure : kExitOk;
}

int tau_table(const ExperimentConfig& c, std::ostream& log) {
    const TauSolution sol = tau_solve(c.tau_t_max, c.tau_rel_tol, c.tau_rel_tol * 1e-2);
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (double t = 0.1; t <= c.tau_t_max * (1 + 1e-12); t *= 10.0) {
        const TauValue v = sol.eval(t);
        const double res = tau_first_integral_residual(v.tau, v.dtau);
        worst = std::max(worst, res);
        rows.push_back({t, v.tau, v.dtau, res, t > 1.0 ? tau_asymptotic_ratio(sol, t) : std::nan("")});
    }
    for (const auto& nd : sol.nodes()) worst = std::max(worst, tau_first_integral_residual(nd.tau, nd.dtau));
    json meta = base_meta(c);
    meta["max_first_integral_residual"] = worst;
    meta["nodes"] = sol.nodes().size();
    write_text(fs::path(c.out_dir) / "tau.csv",
               csv_document(meta.dump(), {"t", "tau", "dtau", "first_integral_residual", "asymptotic_ratio"}, rows));
    log << "tau: nodes=" << sol.nodes().size() << " max_first_integral_residual=" << worst << "\n";
    return worst <= 1e-8 ? kExitOk : kExitInvariant;
}

int check(const ExperimentConfig& c, std::ostream& log) {
    const std::vector<CheckResult> results = run_checks(c.filter, c.seed);
    if (results.empty()) {
        log << "check: no family matches filter '" << c.filter << "'\n";
        return kExitBadConfig;
    }
    int failures = 0;
    for (const auto& r : results) {
        log << (r.passed ? "PASS " : "FAIL ") << r.family << "/" << r.name << " (" << r.seconds << " s) " << r.detail
            << "\n";
        failures += r.passed ? 0 : 1;
    }
    log << "check: " << results.size() - failures << "/" << results.size() << " passed\n";
    return failures == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

FluidState initial_state(const ExperimentConfig& c, const Grid& g) {
    const FluidState raw = generate(g, c.initial);
    if (!c.truncation.enabled) return raw;
    // Index lookup: prepare_initial_data only samples at grid nodes.
    auto index_of = [&g](const double* y) {
        size_t idx = 0;
        for (int a = 0; a < g.dim(); ++a) {
            long j = std::lround((y[a] + g.ell()) / g.dy());
            j = ((j % g.n()) + g.n()) % g.n();
            idx = idx * g.n() + static_cast<size_t>(j);
        }
        return idx;
    };
    return prepare_initial_data(
        g, [&](const double* y) { return raw.sqrtR[index_of(y)]; },
        [&](const double* y, double* out) {
            const size_t i = index_of(y);
            for (int a = 0; a < g.dim(); ++a) out[a] = raw.Lambda[a][i];
        },
        resolve(c.truncation.theta, g.ell()), resolve(c.truncation.iota, g.ell()));
}

std::string csv_document(const std::string& meta_json, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows) {
    std::string out = "# " + meta_json + "\n";
    for (size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + fmt(row[i]);
        out += "\n";
    }
    return out;
}

double overlap_l2_distance(const ScalarField& a, const ScalarField& b) {
    const Grid& ga = a.grid;
    const Grid& gb = b.grid;
    if (ga.dim() != gb.dim() || std::abs(ga.dy() - gb.dy()) > 1e-12 * ga.dy())
        throw std::invalid_argument("overlap_l2_distance: grids must share dimension and spacing");
    const Grid& small = ga.n() <= gb.n() ? ga : gb;
    const ScalarField& fs = ga.n() <= gb.n() ? a : b;
    const ScalarField& fl = ga.n() <= gb.n() ? b : a;
    const int d = small.dim();
    const int shift = (fl.grid.n() - small.n()) / 2;
    double acc = 0.0;
    for (size_t i = 0; i < small.size(); ++i) {
        size_t rem = i, j = 0, stride = 1;
        for (int ax = d - 1; ax >= 0; --ax) {
            j += (rem % small.n() + shift) * stride;
            rem /= small.n();
            stride *= fl.grid.n();
        }
        const double diff = fs[i] - fl[j];
        acc += diff * diff;
    }
    return std::sqrt(acc * small.weight());
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& c) {
    std::vector<SweepRow> rows(c.ladder.size());
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (size_t i = next++; i < rows.size(); i = next++) try {
            ExperimentConfig rc = c;
            const double v = c.ladder[i];
            switch (c.kind) {
                case ExperimentKind::sweep_delta:
                    rc.params.delta1 = rc.params.delta2 = v;
                    break;
                case ExperimentKind::sweep_eta:
                    rc.params.eta1 = rc.params.eta2 = v;
                    break;
                default: {
                    // Same spacing on every box; truncation and drag follow the ell schedule.
                    rc.grid.ell = v;
                    rc.grid.n = sweep_grid_n(c.grid, v);
                    rc.truncation.enabled = true;
                    break;
                }
            }
            const Grid g(rc.grid.d, rc.grid.ell, rc.grid.n);
            const FluidState s0 = initial_state(rc, g);
            if (c.kind == ExperimentKind::sweep_drag_ell) {
                const DragSchedule ds = drag_schedule(v, s0.density(), c.params.eps);
                rc.params.r0 = ds.r0;
                rc.params.r1 = ds.r1;
                rc.params.eps = ds.eps;
            }
            SweepRow& row = rows[i];
            row.axis = v;
            const Trajectory tr = run(s0, rc.params, run_options(rc));
            row.status = tr.status;
            row.message = tr.message;
            row.final = tr.records.back();
            row.R = tr.last.R;
            char sub[32];
            std::snprintf(sub, sizeof sub, "run_%02zu", i);
            emit_run(rc, fs::path(c.out_dir) / sub, tr, json{{"axis", v}});
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    const int nt = std::max(1, std::min<int>(c.threads, static_cast<int>(rows.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

int run_experiment(const ExperimentConfig& c, std::ostream& log) {
    try {
        validate(c);
        switch (c.kind) {
            case ExperimentKind::simulate:
                return simulate(c, log);
            case ExperimentKind::sweep_delta:
            case ExperimentKind::sweep_eta:
            case ExperimentKind::sweep_drag_ell:
                return sweep(c, log);
            case ExperimentKind::longtime:
                return longtime(c, log);
            case ExperimentKind::korteweg_crosscheck:
                return crosscheck(c, log);
            case ExperimentKind::tau:
                return tau_table(c, log);
            case ExperimentKind::check:
                return check(c, log);
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        log << "run failure: " << e.what() << "\n";
        return kExitRunFailure;
    }
    return kExitBadConfig;
}

}  // namespace qnsk
