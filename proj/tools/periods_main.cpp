// periods: build planar separable Hamiltonian families, analyze their
// critical-energy ledgers, compute period functions, and verify lower bounds
// on the number of critical periods.
#include <CLI11.hpp>

#include "periods/critical.hpp"
#include "periods/energy.hpp"
#include "periods/errors.hpp"
#include "periods/orbit.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace periods;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitHypothesisOrBound = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

struct RunOptions {
    std::string config_path;
    std::string spec_path;
    std::string family;
    std::string alphas;
    std::string betas;
    std::string epsilon = "0";
    std::string saddle_beta;
    bool e_scaled = false;
    std::string preset;
    int k = 1;

    GridParams grid;
    std::string epsilon_start = "1e-2";
    int max_halvings = 12;
    double tol = 1e-9;
    std::string h;
    int n_points = 256;
    std::string method = "return-time";
    int decades = 2;

    std::string out;
    std::string report;
    std::string out_dir;
};

std::vector<Rational> parse_list(const std::string& csv) {
    std::vector<Rational> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_rational(tok));
    }
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError(std::string("unknown config key in ") + where + ": " + it.key());
}

/// Config file values fill any option the command line left untouched.
void merge_config(RunOptions& opt, const CLI::App& cmd) {
    if (opt.config_path.empty()) return;
    json j = load_json_file(opt.config_path);
    reject_unknown_keys(j, {"spec", "family", "alphas", "betas", "epsilon", "saddle_beta",
                            "e_scaled", "preset", "k", "grid", "epsilon_start", "max_halvings",
                            "tol", "h", "n_points", "method", "decades", "out", "report",
                            "out_dir"},
                        "config");
    auto unset = [&](const char* flag) {
        const CLI::Option* o = cmd.get_option_no_throw(flag);
        return o == nullptr || o->count() == 0;
    };
    auto pull_str = [&](const char* key, const char* flag, std::string& dst) {
        if (j.contains(key) && unset(flag)) {
            const auto& v = j.at(key);
            dst = v.is_string() ? v.get<std::string>() : v.dump();
        }
    };
    pull_str("family", "--family", opt.family);
    pull_str("alphas", "--alphas", opt.alphas);
    pull_str("betas", "--betas", opt.betas);
    pull_str("epsilon", "--epsilon", opt.epsilon);
    pull_str("saddle_beta", "--saddle-beta", opt.saddle_beta);
    pull_str("preset", "--preset", opt.preset);
    pull_str("epsilon_start", "--epsilon-start", opt.epsilon_start);
    pull_str("h", "--energy", opt.h);
    pull_str("method", "--method", opt.method);
    pull_str("out", "--out", opt.out);
    pull_str("report", "--report", opt.report);
    pull_str("out_dir", "--out-dir", opt.out_dir);
    if (j.contains("e_scaled") && unset("--e-scaled")) opt.e_scaled = j.at("e_scaled").get<bool>();
    if (j.contains("k") && unset("--k")) opt.k = j.at("k").get<int>();
    if (j.contains("max_halvings") && unset("--max-halvings"))
        opt.max_halvings = j.at("max_halvings").get<int>();
    if (j.contains("tol") && unset("--tol")) opt.tol = j.at("tol").get<double>();
    if (j.contains("n_points") && unset("--n-points")) opt.n_points = j.at("n_points").get<int>();
    if (j.contains("decades") && unset("--decades")) opt.decades = j.at("decades").get<int>();
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown_keys(g, {"global_points", "cluster_points", "cluster_decades"}, "grid");
        if (g.contains("global_points") && unset("--global-points"))
            opt.grid.global_points = g.at("global_points").get<int>();
        if (g.contains("cluster_points") && unset("--cluster-points"))
            opt.grid.cluster_points = g.at("cluster_points").get<int>();
        if (g.contains("cluster_decades") && unset("--cluster-decades"))
            opt.grid.cluster_decades = g.at("cluster_decades").get<int>();
    }
}

std::optional<json> inline_spec_from_config(const RunOptions& opt) {
    if (opt.config_path.empty()) return std::nullopt;
    json j = load_json_file(opt.config_path);
    if (j.contains("spec")) return j.at("spec");
    return std::nullopt;
}

SystemSpec preset_spec(const std::string& preset, int k, const Rational& epsilon) {
    if (preset == "fig2") return build_potential({1, 2, 3}, epsilon).spec;
    if (preset == "fig4") return build_separable({Rational(4)}, {Rational(2)}, epsilon).spec;
    if (preset == "example1") return build_example_odd(k, epsilon).spec;
    if (preset == "example2") return build_example_even(k, epsilon).spec;
    throw ValidationError("unknown preset: " + preset +
                          " (expected fig2 | fig4 | example1 | example2)");
}

SystemSpec resolve_spec(const RunOptions& opt, const CLI::App& cmd) {
    Rational epsilon = parse_rational(opt.epsilon);
    if (!opt.preset.empty()) {
        const CLI::Option* eps_opt = cmd.get_option_no_throw("--epsilon");
        const bool eps_given = eps_opt != nullptr && eps_opt->count() > 0;
        SystemSpec spec = preset_spec(opt.preset, opt.k, eps_given ? epsilon : Rational(0));
        return spec;
    }
    if (!opt.spec_path.empty()) return spec_from_json(load_json_file(opt.spec_path));
    if (auto inline_spec = inline_spec_from_config(opt)) return spec_from_json(*inline_spec);
    if (opt.family.empty())
        throw ValidationError("no system given: use --preset, --spec, --config, or --family");
    SystemSpec spec;
    spec.family = family_from_name(opt.family);
    spec.alphas = parse_list(opt.alphas);
    spec.betas = parse_list(opt.betas);
    spec.epsilon = epsilon;
    if (!opt.saddle_beta.empty()) spec.saddle_beta = parse_rational(opt.saddle_beta);
    spec.e_scaled = opt.e_scaled;
    spec.validate();
    return spec;
}

void write_text_file(const std::string& path, const std::string& text) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

class Manifest {
  public:
    Manifest(std::string command, const SystemSpec& spec) : start_(Clock::now()) {
        j_["command"] = std::move(command);
        j_["version"] = kVersion;
        j_["config"]["spec"] = spec_to_json(spec);
        j_["outputs"] = json::array();
    }
    json& config() { return j_["config"]; }
    void add_output(const std::string& path) { j_["outputs"].push_back(path); }
    void write(const std::string& path) {
        j_["timings"]["total_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
        write_json_file(path, j_);
    }

  private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_;
    json j_;
};

std::string manifest_path_for(const std::string& anchor) {
    fs::path p(anchor);
    p.replace_extension();
    return p.string() + ".manifest.json";
}

json hypothesis_json(const System& sys, double tol) {
    if (sys.spec.e_scaled) return verdict_to_json(certify_system(sys));
    return verdict_to_json(check_hypothesis_numeric(critical_energy_ledger(sys), tol));
}

bool hypothesis_distinct(const System& sys, double tol) {
    if (sys.spec.e_scaled) return certify_system(sys).distinct;
    return check_hypothesis_numeric(critical_energy_ledger(sys), tol).distinct;
}

// ---------------------------------------------------------------- commands

int cmd_analyze(const RunOptions& opt, const CLI::App& cmd) {
    SystemSpec spec = resolve_spec(opt, cmd);
    System sys = build_from_spec(spec);
    Manifest manifest("analyze", spec);

    System skeleton = spec.epsilon == 0 ? sys : rebuild_with_epsilon(spec, 0);
    auto points = singular_points(skeleton);
    EnergyLedger ledger = critical_energy_ledger(sys);
    json verdict = hypothesis_json(sys, opt.tol);
    const double T0 = linearized_period(sys);

    std::cout << "family: " << family_name(spec.family) << "  k=" << spec.k()
              << "  degree=" << spec.degree() << "  epsilon=" << to_double(spec.epsilon) << "\n";
    std::cout << "singularities (epsilon = 0 skeleton):\n";
    for (const auto& p : points)
        std::cout << "  " << singularity_kind_name(p.kind) << " at (" << p.x << ", " << p.y
                  << ")  H=" << p.energy << "\n";
    std::cout << "critical-energy ledger:\n";
    for (const auto& e : ledger.entries)
        std::cout << "  h=" << e.h << (e.h_exact ? "  (" + to_fraction_string(*e.h_exact) + ")" : "")
                  << "  from " << singularity_kind_name(e.source.kind) << "\n";
    std::cout << "hypothesis: " << (verdict["distinct"].get<bool>() ? "distinct" : "VIOLATED")
              << "  method=" << verdict["method"].get<std::string>()
              << "  min_gap=" << ledger.min_gap << "\n";
    std::cout << "linearized period T(0) = " << T0 << "\n";

    json report;
    report["spec"] = spec_to_json(spec);
    report["singularities"] = json::array();
    for (const auto& p : points)
        report["singularities"].push_back({{"x", p.x},
                                           {"y", p.y},
                                           {"kind", singularity_kind_name(p.kind)},
                                           {"h", p.energy}});
    report["ledger"] = ledger_to_json(ledger);
    report["hypothesis"] = verdict;
    report["linearized_period"] = T0;
    if (!opt.report.empty()) {
        write_json_file(opt.report, report);
        manifest.add_output(opt.report);
        manifest.write(manifest_path_for(opt.report));
    }
    return verdict["distinct"].get<bool>() ? kExitOk : kExitHypothesisOrBound;
}

int cmd_hypothesis(const RunOptions& opt, const CLI::App& cmd) {
    SystemSpec spec = resolve_spec(opt, cmd);
    System sys = build_from_spec(spec);
    Manifest manifest("hypothesis", spec);
    json verdict = hypothesis_json(sys, opt.tol);
    std::cout << verdict.dump(2) << "\n";
    if (!opt.report.empty()) {
        write_json_file(opt.report, verdict);
        manifest.add_output(opt.report);
        manifest.write(manifest_path_for(opt.report));
    }
    return verdict["distinct"].get<bool>() ? kExitOk : kExitHypothesisOrBound;
}

int cmd_period_curve(const RunOptions& opt, const CLI::App& cmd) {
    SystemSpec spec = resolve_spec(opt, cmd);
    System sys = build_from_spec(spec);
    Manifest manifest("period-curve", spec);

    EnergyLedger ledger = critical_energy_ledger(sys);
    std::vector<double> centers = perturbed_cluster_centers(sys);
    std::vector<double> grid = build_h_grid(ledger, opt.grid, sys, centers);

    PeriodCurve curve;
    if (opt.method == "quadrature") {
        curve.attempted = grid.size();
        for (double h : grid) {
            try {
                curve.samples.push_back(period_quadrature_potential(sys, h));
            } catch (const RangeError&) {
                ++curve.failed;
            }
        }
    } else if (opt.method == "return-time") {
        curve = sample_curve(sys, grid);
    } else {
        throw ValidationError("unknown method: " + opt.method);
    }
    for (const auto& line : curve.log) std::cerr << line << "\n";
    std::cout << "sampled " << curve.samples.size() << "/" << curve.attempted << " energies\n";

    std::ostringstream csv;
    write_curve_csv(csv, curve);
    if (!opt.out.empty()) {
        write_text_file(opt.out, csv.str());
        manifest.add_output(opt.out);
        manifest.write(manifest_path_for(opt.out));
    } else {
        std::cout << csv.str();
    }
    return kExitOk;
}

int cmd_critical_points(const RunOptions& opt, const CLI::App& cmd) {
    SystemSpec spec = resolve_spec(opt, cmd);
    System sys = build_from_spec(spec);
    Manifest manifest("critical-points", spec);

    EnergyLedger ledger = critical_energy_ledger(sys);
    std::vector<double> centers = perturbed_cluster_centers(sys);
    std::vector<double> grid = build_h_grid(ledger, opt.grid, sys, centers);
    PeriodCurve curve = sample_curve(sys, grid);
    std::vector<std::string> detect_log;
    std::vector<CriticalPoint> points = detect_critical_points(curve, sys, &detect_log);
    for (const auto& line : curve.log) std::cerr << line << "\n";
    for (const auto& line : detect_log) std::cerr << line << "\n";

    json out = json::array();
    for (const auto& p : points) {
        out.push_back({{"h", p.h_star},
                       {"T", p.T_star},
                       {"kind", extremum_kind_name(p.kind)},
                       {"bracket", {p.bracket_lo, p.bracket_hi}},
                       {"refined_width", p.refined_width}});
        std::cout << extremum_kind_name(p.kind) << " at h=" << p.h_star << "  T=" << p.T_star
                  << "\n";
    }
    std::cout << "found " << points.size() << " critical periods\n";
    if (!opt.report.empty()) {
        write_json_file(opt.report, out);
        manifest.add_output(opt.report);
        manifest.write(manifest_path_for(opt.report));
    }
    return kExitOk;
}

int run_verify(const SystemSpec& spec, const RunOptions& opt, const std::string& report_path,
               Manifest* parent_manifest) {
    BoundReport report = verify_bound(spec, to_double(parse_rational(opt.epsilon_start)), opt.grid,
                                      opt.max_halvings);
    for (const auto& t : report.schedule)
        std::cout << "epsilon=" << t.epsilon << "  found=" << t.found << "  (samples=" << t.samples
                  << ", failed=" << t.failed << ")\n";
    std::cout << (report.pass ? "PASS" : "FAIL") << ": found " << report.found << ", required "
              << report.required << "\n";
    if (!report_path.empty()) {
        write_json_file(report_path, report_to_json(report));
        if (parent_manifest) parent_manifest->add_output(report_path);
    }
    return report.pass ? kExitOk : kExitHypothesisOrBound;
}

int cmd_verify(const RunOptions& opt, const CLI::App& cmd) {
    SystemSpec spec = resolve_spec(opt, cmd);
    Manifest manifest("verify", spec);
    manifest.config()["epsilon_start"] = opt.epsilon_start;
    manifest.config()["max_halvings"] = opt.max_halvings;
    int rc = run_verify(spec, opt, opt.report, &manifest);
    if (!opt.report.empty()) manifest.write(manifest_path_for(opt.report));
    return rc;
}

int cmd_trace(const RunOptions& opt, const CLI::App& cmd) {
    SystemSpec spec = resolve_spec(opt, cmd);
    System sys = build_from_spec(spec);
    if (opt.h.empty()) throw ValidationError("trace needs --energy");
    Manifest manifest("trace", spec);
    OrbitTrace trace = trace_orbit(sys, to_double(parse_rational(opt.h)), opt.n_points);
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    if (!opt.out.empty()) {
        write_text_file(opt.out, csv.str());
        manifest.add_output(opt.out);
        manifest.write(manifest_path_for(opt.out));
    } else {
        std::cout << csv.str();
    }
    return kExitOk;
}

int cmd_reproduce(const RunOptions& opt, const CLI::App& cmd) {
    if (opt.preset.empty()) throw ValidationError("reproduce needs --preset");
    RunOptions local = opt;
    if (local.out_dir.empty())
        local.out_dir = "runs/" + local.preset +
                        (local.preset.rfind("example", 0) == 0 ? "-k" + std::to_string(local.k) : "");
    fs::create_directories(local.out_dir);
    auto in_dir = [&](const std::string& name) { return (fs::path(local.out_dir) / name).string(); };

    SystemSpec spec = resolve_spec(local, cmd);
    Manifest manifest("reproduce", spec);
    manifest.config()["preset"] = local.preset;
    manifest.config()["k"] = local.k;
    manifest.config()["epsilon_start"] = local.epsilon_start;

    write_json_file(in_dir("spec.json"), spec_to_json(spec));
    manifest.add_output(in_dir("spec.json"));

    System sys = build_from_spec(spec);
    EnergyLedger ledger = critical_energy_ledger(sys);
    write_json_file(in_dir("ledger.json"), ledger_to_json(ledger));
    manifest.add_output(in_dir("ledger.json"));

    json verdict = hypothesis_json(sys, local.tol);
    write_json_file(in_dir("hypothesis.json"), verdict);
    manifest.add_output(in_dir("hypothesis.json"));
    std::cout << "hypothesis: " << (verdict["distinct"].get<bool>() ? "distinct" : "VIOLATED")
              << " (" << verdict["method"].get<std::string>() << ")\n";
    if (!verdict["distinct"].get<bool>()) {
        manifest.write(in_dir("manifest.json"));
        return kExitHypothesisOrBound;
    }

    // unperturbed period curve and one orbit trace per annulus
    if (spec.epsilon == 0) {
        std::vector<double> grid = build_h_grid(ledger, local.grid, sys, {});
        PeriodCurve curve = sample_curve(sys, grid);
        std::ostringstream csv;
        write_curve_csv(csv, curve);
        write_text_file(in_dir("curve.csv"), csv.str());
        manifest.add_output(in_dir("curve.csv"));

        std::vector<double> edges{0.0};
        for (double e : sys.skeleton_energies) {
            if (e <= 0) continue;
            if (sys.annulus_roof_energy && e >= *sys.annulus_roof_energy * (1 - 1e-12)) continue;
            edges.push_back(e);
        }
        edges.push_back(sys.annulus_roof_energy ? *sys.annulus_roof_energy
                                                : 2.0 * std::max(edges.back(), 1.0));
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double h = 0.5 * (edges[i] + edges[i + 1]);
            OrbitTrace trace = trace_orbit(sys, h, local.n_points);
            std::ostringstream tcsv;
            write_trace_csv(tcsv, trace);
            std::string name = "trace_annulus" + std::to_string(i) + ".csv";
            write_text_file(in_dir(name), tcsv.str());
            manifest.add_output(in_dir(name));
        }
    }

    int rc = run_verify(spec, local, in_dir("report.json"), &manifest);
    manifest.write(in_dir("manifest.json"));
    std::cout << "artifacts in " << local.out_dir << "\n";
    return rc;
}

void add_common_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file (flags override it)");
    cmd->add_option("--spec", opt.spec_path, "system spec JSON file");
    cmd->add_option("--family", opt.family,
                    "potential-odd | potential-even | separable-odd | separable-even");
    cmd->add_option("--alphas", opt.alphas, "comma-separated alphas (exact decimals or p/q)");
    cmd->add_option("--betas", opt.betas, "comma-separated betas");
    cmd->add_option("--epsilon", opt.epsilon, "perturbation parameter (exact decimal or p/q)");
    cmd->add_option("--saddle-beta", opt.saddle_beta, "saddle abscissa (even families)");
    cmd->add_flag("--e-scaled", opt.e_scaled, "betas are integer grid indices scaled by e");
    cmd->add_option("--preset", opt.preset, "fig2 | fig4 | example1 | example2");
    cmd->add_option("--k", opt.k, "preset order k");
    cmd->add_option("--tol", opt.tol, "relative tolerance for the numeric hypothesis gap");
}

void add_grid_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--global-points", opt.grid.global_points, "log-uniform grid size");
    cmd->add_option("--cluster-points", opt.grid.cluster_points, "cluster points per side");
    cmd->add_option("--cluster-decades", opt.grid.cluster_decades, "cluster offset decades");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"period functions and critical periods of planar polynomial Hamiltonian systems"};
    app.require_subcommand(1);

    RunOptions opt;

    CLI::App* analyze = app.add_subcommand("analyze", "singularities, ledger, hypothesis, T(0)");
    add_common_options(analyze, opt);
    analyze->add_option("--report", opt.report, "write the JSON report here");

    CLI::App* curve = app.add_subcommand("period-curve", "sample T(h) over an adaptive grid");
    add_common_options(curve, opt);
    add_grid_options(curve, opt);
    curve->add_option("--method", opt.method, "return-time | quadrature");
    curve->add_option("--out", opt.out, "CSV output path (default stdout)");

    CLI::App* crit = app.add_subcommand("critical-points", "detect and refine critical periods");
    add_common_options(crit, opt);
    add_grid_options(crit, opt);
    crit->add_option("--report", opt.report, "JSON output path");

    CLI::App* verify = app.add_subcommand("verify", "check the family's critical-period bound");
    add_common_options(verify, opt);
    add_grid_options(verify, opt);
    verify->add_option("--epsilon-start", opt.epsilon_start, "epsilon schedule start");
    verify->add_option("--max-halvings", opt.max_halvings, "epsilon halvings before giving up");
    verify->add_option("--report", opt.report, "BoundReport JSON path");

    CLI::App* hyp = app.add_subcommand("hypothesis", "distinctness check only");
    add_common_options(hyp, opt);
    hyp->add_option("--report", opt.report, "verdict JSON path");

    CLI::App* trace = app.add_subcommand("trace", "one closed orbit as CSV");
    add_common_options(trace, opt);
    trace->add_option("--energy", opt.h, "orbit energy");
    trace->add_option("--n-points", opt.n_points, "samples along the revolution");
    trace->add_option("--out", opt.out, "CSV output path (default stdout)");

    CLI::App* rep = app.add_subcommand("reproduce", "one-command pipeline for a preset");
    add_common_options(rep, opt);
    add_grid_options(rep, opt);
    rep->add_option("--epsilon-start", opt.epsilon_start, "epsilon schedule start");
    rep->add_option("--max-halvings", opt.max_halvings, "epsilon halvings before giving up");
    rep->add_option("--n-points", opt.n_points, "trace samples per annulus");
    rep->add_option("--out-dir", opt.out_dir, "artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        merge_config(opt, *active);
        if (active == analyze) return cmd_analyze(opt, *active);
        if (active == curve) return cmd_period_curve(opt, *active);
        if (active == crit) return cmd_critical_points(opt, *active);
        if (active == verify) return cmd_verify(opt, *active);
        if (active == hyp) return cmd_hypothesis(opt, *active);
        if (active == trace) return cmd_trace(opt, *active);
        if (active == rep) return cmd_reproduce(opt, *active);
        return kExitUsage;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return kExitHypothesisOrBound;
    } catch (const ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
