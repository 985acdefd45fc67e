#pragma once

#include <qbmor/benchmarks.hpp>
#include <qbmor/errors.hpp>
#include <qbmor/integration.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/io.hpp>
#include <qbmor/metrics.hpp>
#include <qbmor/pod.hpp>
#include <qbmor/projection.hpp>
#include <qbmor/system.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qbmor {

enum class SystemKind { heated_rod, toda, load };

/// Everything one run needs. Unset keys take the defaults of the chosen
/// system kind.
struct RunConfig {
    SystemKind system = SystemKind::heated_rod;
    Index n = 200;
    double tau = 1.0;
    Index ell = 100;
    std::string path;

    std::vector<std::string> methods;
    Index r = 24;
    double omega_min = 1e-3;
    double omega_max = 1e3;
    std::size_t oversample = 8;
    Compression compression = Compression::pivoted_qr;
    bool split = false;
    /// 0 selects the natural split of the system (Toda: positions | auxiliaries)
    Index split_row = 0;

    double t_final = 30.0;
    double step = 1e-2;

    double mu = 2.0;
    double smoothing = 0.25;
    std::uint64_t seed = 1;

    std::size_t sweep_points = 500;
    std::size_t sweep_points2 = 500;

    void validate() const;
};

/// The ten roster tags in table order.
[[nodiscard]] inline const std::vector<std::string>& method_roster() {
    static const std::vector<std::string> roster{
        "SymInt(V,equi)", "SymInt(VW,equi)", "SymInt(V,avg)", "SymInt(VW,avg)", "GenInt(V,equi)",
        "GenInt(VW,equi)", "GenInt(V,avg)", "GenInt(VW,avg)", "POD(equi-cost)", "POD(avg)"};
    return roster;
}

struct MethodSpec {
    std::string tag;
    bool pod = false;
    bool avg = false;
    Method method = Method::SymInt;
    Sidedness side = Sidedness::V;
};

[[nodiscard]] inline MethodSpec parse_method(const std::string& tag) {
    MethodSpec spec;
    spec.tag = tag;
    if (tag == "POD(equi-cost)" || tag == "POD(avg)") {
        spec.pod = true;
        spec.avg = tag == "POD(avg)";
        return spec;
    }
    for (auto m : {Method::SymInt, Method::GenInt})
        for (auto s : {Sidedness::V, Sidedness::VW})
            for (bool avg : {false, true})
                if (method_tag(m, s, avg) == tag) {
                    spec.method = m;
                    spec.side = s;
                    spec.avg = avg;
                    return spec;
                }
    throw ConfigError("unknown method '" + tag + "'");
}

/// Splits a method list on commas outside parentheses. "all" selects the
/// roster.
[[nodiscard]] inline std::vector<std::string> parse_method_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    auto flush = [&] {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
        cur.clear();
    };
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            flush();
        } else if (c != ' ' || depth == 0) {
            cur.push_back(c);
        }
    }
    flush();
    if (out.size() == 1 && out[0] == "all") return method_roster();
    for (const auto& m : out) (void)parse_method(m);
    return out;
}

inline void RunConfig::validate() const {
    if (r < 1) throw ConfigError("r must be at least 1");
    if (!(omega_min > 0.0) || !(omega_min < omega_max)) throw ConfigError("need 0 < omega_min < omega_max");
    if (!(step > 0.0) || !(t_final > 0.0)) throw ConfigError("need step > 0 and t_final > 0");
    if (!(smoothing >= 0.0)) throw ConfigError("smoothing must be >= 0");
    if (sweep_points < 1 || sweep_points2 < 1) throw ConfigError("sweep point counts must be positive");
    if (oversample < 1) throw ConfigError("oversample must be positive");
    if (split_row < 0) throw ConfigError("split_row must be >= 0");
    if (system == SystemKind::heated_rod && n < 2) throw ConfigError("heated rod needs n >= 2");
    if (system == SystemKind::toda && ell < 1) throw ConfigError("toda needs ell >= 1");
    if (system == SystemKind::load && path.empty()) throw ConfigError("system.path is required for kind = load");
    if (methods.empty()) throw ConfigError("no methods selected");
    for (const auto& m : methods) (void)parse_method(m);
}

[[nodiscard]] inline RunConfig defaults_for(SystemKind kind) {
    RunConfig c;
    c.system = kind;
    c.methods = method_roster();
    switch (kind) {
        case SystemKind::heated_rod:
            break;
        case SystemKind::toda:
            c.r = 20;
            c.split = true;
            c.t_final = 100.0;
            c.mu = 0.0;
            c.smoothing = 2.0;
            break;
        case SystemKind::load:
            c.r = 10;
            c.t_final = 10.0;
            c.mu = 0.0;
            c.smoothing = 1.0;
            break;
    }
    return c;
}

struct ConfigKey {
    const char* section;
    const char* key;
    const char* help;
};

[[nodiscard]] inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"system", "kind", "heated_rod, toda or load"},
        {"system", "n", "heated rod grid size"},
        {"system", "tau", "heated rod delay"},
        {"system", "ell", "Toda particle count"},
        {"system", "path", "matrix directory for kind = load"},
        {"reduction", "methods", "comma separated roster tags or 'all'"},
        {"reduction", "r", "reduced order (before split congruence)"},
        {"reduction", "omega_min", "lower end of the frequency range [rad/s]"},
        {"reduction", "omega_max", "upper end of the frequency range [rad/s]"},
        {"reduction", "oversample", "sample points of the avg strategies"},
        {"reduction", "compression", "pivoted_qr or svd"},
        {"reduction", "split", "split congruence on or off"},
        {"reduction", "split_row", "first row of the second split block (0 = natural)"},
        {"time", "t_final", "simulation horizon"},
        {"time", "step", "time step"},
        {"gp", "mu", "input mean"},
        {"gp", "smoothing", "kernel length scale"},
        {"gp", "seed", "input seed"},
        {"sweep", "points", "level-1 sweep points"},
        {"sweep", "points2", "level-2 sweep points per axis"},
    };
    return keys;
}

namespace detail {

template <class T>
T config_value(const boost::property_tree::ptree& pt, const std::string& key) {
    try {
        return pt.get<T>(key);
    } catch (const boost::property_tree::ptree_error&) {
        throw ConfigError("bad value for " + key + ": '" + pt.get<std::string>(key, "") + "'");
    }
}

inline bool parse_bool(const std::string& key, std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("bad value for " + key + ": '" + v + "'");
}

inline SystemKind parse_kind(const std::string& v) {
    if (v == "heated_rod") return SystemKind::heated_rod;
    if (v == "toda") return SystemKind::toda;
    if (v == "load") return SystemKind::load;
    throw ConfigError("unknown system kind '" + v + "'");
}

}  // namespace detail

/// Reads an INI file (empty path: none) and applies `section.key=value`
/// overrides on top.
[[nodiscard]] inline RunConfig load_run_config(const std::string& path,
                                               const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    if (!path.empty()) {
        try {
            pt::read_ini(path, tree);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError(std::string("cannot read config: ") + e.what());
        }
    }
    auto known = [](const std::string& dotted) {
        for (const auto& k : config_keys())
            if (dotted == std::string(k.section) + "." + k.key) return true;
        return false;
    };
    for (const auto& [section, sub] : tree) {
        if (sub.empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, value] : sub)
            if (!known(section + "." + key)) throw ConfigError("unknown config key " + section + "." + key);
    }
    for (const auto& [key, value] : overrides) {
        if (!known(key)) throw ConfigError("unknown config key " + key);
        tree.put(key, value);
    }

    RunConfig c = defaults_for(detail::parse_kind(tree.get<std::string>("system.kind", "heated_rod")));
    auto has = [&](const char* key) { return static_cast<bool>(tree.get_optional<std::string>(key)); };
    using detail::config_value;
    if (has("system.n")) c.n = config_value<Index>(tree, "system.n");
    if (has("system.tau")) c.tau = config_value<double>(tree, "system.tau");
    if (has("system.ell")) c.ell = config_value<Index>(tree, "system.ell");
    if (has("system.path")) c.path = tree.get<std::string>("system.path");
    if (has("reduction.methods")) c.methods = parse_method_list(tree.get<std::string>("reduction.methods"));
    if (has("reduction.r")) c.r = config_value<Index>(tree, "reduction.r");
    if (has("reduction.omega_min")) c.omega_min = config_value<double>(tree, "reduction.omega_min");
    if (has("reduction.omega_max")) c.omega_max = config_value<double>(tree, "reduction.omega_max");
    if (has("reduction.oversample")) c.oversample = config_value<std::size_t>(tree, "reduction.oversample");
    if (has("reduction.compression")) {
        const auto v = tree.get<std::string>("reduction.compression");
        if (v == "pivoted_qr") {
            c.compression = Compression::pivoted_qr;
        } else if (v == "svd") {
            c.compression = Compression::svd;
        } else {
            throw ConfigError("unknown compression '" + v + "'");
        }
    }
    if (has("reduction.split")) c.split = detail::parse_bool("reduction.split", tree.get<std::string>("reduction.split"));
    if (has("reduction.split_row")) c.split_row = config_value<Index>(tree, "reduction.split_row");
    if (has("time.t_final")) c.t_final = config_value<double>(tree, "time.t_final");
    if (has("time.step")) c.step = config_value<double>(tree, "time.step");
    if (has("gp.mu")) c.mu = config_value<double>(tree, "gp.mu");
    if (has("gp.smoothing")) c.smoothing = config_value<double>(tree, "gp.smoothing");
    if (has("gp.seed")) c.seed = config_value<std::uint64_t>(tree, "gp.seed");
    if (has("sweep.points")) {
        c.sweep_points = config_value<std::size_t>(tree, "sweep.points");
        c.sweep_points2 = c.sweep_points;
    }
    if (has("sweep.points2")) c.sweep_points2 = config_value<std::size_t>(tree, "sweep.points2");
    c.validate();
    return c;
}

[[nodiscard]] inline std::string system_id(const RunConfig& c) {
    std::ostringstream os;
    switch (c.system) {
        case SystemKind::heated_rod: os << "heated_rod(n=" << c.n << ",tau=" << c.tau << ")"; break;
        case SystemKind::toda: os << "toda(ell=" << c.ell << ")"; break;
        case SystemKind::load: os << "load(" << c.path << ")"; break;
    }
    return os.str();
}

[[nodiscard]] inline StructuredQBSystem build_system(const RunConfig& c) {
    switch (c.system) {
        case SystemKind::heated_rod: return build_heated_rod({c.n, c.tau});
        case SystemKind::toda: {
            TodaConfig t;
            t.ell = c.ell;
            return build_toda(t);
        }
        case SystemKind::load: return load_system(c.path);
    }
    throw ConfigError("unknown system kind");
}

[[nodiscard]] inline Index split_row_for(const RunConfig& c, const StructuredQBSystem& sys) {
    if (c.split_row > 0) return c.split_row;
    if (c.system == SystemKind::toda) {
        TodaConfig t;
        t.ell = c.ell;
        return toda_split_row(t);
    }
    return sys.n / 2;
}

/// Implicit time steps a POD model may spend to match the one-sided equi
/// interpolation work (factorizations plus solves), at least r.
[[nodiscard]] inline std::size_t equi_cost_budget(const StructuredQBSystem& sys, const RunConfig& c) {
    std::size_t budget = static_cast<std::size_t>(c.r);
    for (auto m : {Method::SymInt, Method::GenInt}) {
        try {
            const auto b = strategy_equi(sys, m, Sidedness::V, c.r, {c.omega_min, c.omega_max});
            budget = std::max(budget, b.work.factorizations + b.work.solves);
        } catch (const Error&) {
        }
    }
    return budget;
}

/// Basis of one roster method, split congruence applied when configured.
[[nodiscard]] inline ReductionBasis build_basis(const StructuredQBSystem& sys, const RunConfig& c, const MethodSpec& spec) {
    ReductionBasis b;
    if (spec.pod) {
        double horizon = c.t_final;
        if (!spec.avg) {
            const auto per_channel =
                (equi_cost_budget(sys, c) + static_cast<std::size_t>(sys.m) - 1) / static_cast<std::size_t>(sys.m);
            horizon = static_cast<double>(per_channel) * c.step;
        }
        b = pod_basis(collect_snapshots(sys, horizon, c.step), c.r, spec.tag);
    } else if (spec.avg) {
        b = strategy_avg(sys, spec.method, spec.side, c.r, {c.omega_min, c.omega_max}, c.oversample, c.compression);
    } else {
        b = strategy_equi(sys, spec.method, spec.side, c.r, {c.omega_min, c.omega_max});
    }
    if (c.split) b = split_congruence(b, split_row_for(c, sys));
    return b;
}

/// Runs f(0..count-1) on up to hardware_concurrency worker threads. Results
/// must be written by index, so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) {
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1U, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) f(i);
        });
    for (auto& t : pool) t.join();
}

struct MethodRun {
    std::string tag;
    std::optional<ReducedModel> model;
    std::string error;
    std::optional<Trajectory> trajectory;
    bool stable = true;
    std::string sim_note;
    std::optional<FrequencyErrors> level1;
    std::optional<FrequencyErrors> level2;

    [[nodiscard]] bool self_check_failed() const { return model && !model->all_pass(); }
};

struct ExperimentOptions {
    bool simulate = false;
    bool sweep1 = false;
    bool sweep2 = false;
};

struct ExperimentRun {
    RunConfig config;
    std::string system_id;
    StructuredQBSystem system;
    std::optional<GPInputSignal> input;
    std::optional<Trajectory> full;
    std::vector<double> grid1;
    std::vector<double> grid2;
    std::vector<MethodRun> methods;

    [[nodiscard]] bool self_check_failed() const {
        return std::any_of(methods.begin(), methods.end(), [](const MethodRun& m) { return m.self_check_failed(); });
    }

    [[nodiscard]] std::vector<ErrorReport> reports() const {
        std::vector<ErrorReport> out;
        for (const auto& m : methods) {
            ErrorReport r;
            r.method_tag = m.tag;
            r.stable = m.stable && m.model.has_value();
            r.note = m.model ? m.sim_note : m.error;
            if (m.model && m.trajectory && full) {
                r.relerr_L2 = relerr_L2(*full, *m.trajectory);
                r.relerr_Linf = relerr_Linf(*full, *m.trajectory);
            }
            if (m.level1) r.relerr_Hinf_1 = m.level1->hinf();
            if (m.level2) r.relerr_Hinf_2 = m.level2->hinf();
            out.push_back(r);
        }
        return out;
    }
};

/// GP input on a support grid of spacing max(step, smoothing / 8), linearly
/// interpolated by the integrator.
[[nodiscard]] inline GPInputSignal make_input(const RunConfig& c, Index m) {
    const double spacing = c.smoothing > 0.0 ? std::max(c.step, c.smoothing / 8.0) : c.step;
    const auto count = static_cast<std::size_t>(std::ceil(c.t_final / spacing - 1e-9));
    std::vector<double> grid(count + 1);
    for (std::size_t i = 0; i <= count; ++i)
        grid[i] = c.t_final * static_cast<double>(i) / static_cast<double>(count);
    return sample_gp_input(c.mu, c.smoothing, grid, c.seed, m);
}

/// A reduced trajectory counts as unstable when the integrator fails or its
/// output exceeds 1e6 times the largest full output.
inline void simulate_reduced(MethodRun& run, const GPInputSignal& u, const Trajectory& full, const RunConfig& c) {
    try {
        auto tr = simulate(run.model->system, u, c.t_final, c.step);
        const double bound = 1e6 * std::max(full.outputs.cwiseAbs().maxCoeff(), 1e-300);
        if (!tr.outputs.allFinite() || tr.outputs.cwiseAbs().maxCoeff() > bound) {
            run.stable = false;
            run.sim_note = "unstable: output exceeds bound";
            return;
        }
        run.trajectory = std::move(tr);
    } catch (const IntegrationFailure& e) {
        run.stable = false;
        run.sim_note = std::string("unstable: ") + e.what();
    }
}

/// Builds the system, reduces it with every configured method concurrently
/// and evaluates what `opt` asks for. A failing method is recorded and never
/// affects the others.
[[nodiscard]] inline ExperimentRun run_experiment(const RunConfig& c, const ExperimentOptions& opt = {}) {
    c.validate();
    ExperimentRun run;
    run.config = c;
    run.system_id = system_id(c);
    run.system = build_system(c);
    const auto& sys = run.system;
    run.methods.resize(c.methods.size());

    if (opt.simulate) {
        run.input = make_input(c, sys.m);
        run.full = simulate(sys, *run.input, c.t_final, c.step);
    }
    std::optional<SweepValues> full1, full2;
    if (opt.sweep1) {
        run.grid1 = log_grid(c.omega_min, c.omega_max, c.sweep_points);
        full1 = sweep_values_level1(sys, run.grid1);
    }
    if (opt.sweep2) {
        run.grid2 = log_grid(c.omega_min, c.omega_max, c.sweep_points2);
        full2 = sweep_values_level2(sys, run.grid2, run.grid2);
    }

    parallel_for(c.methods.size(), [&](std::size_t i) {
        MethodRun& m = run.methods[i];
        m.tag = c.methods[i];
        try {
            const auto spec = parse_method(m.tag);
            auto red = project(sys, build_basis(sys, c, spec), run.system_id);
            verify(sys, red);
            m.model = std::move(red);
        } catch (const std::exception& e) {
            m.error = e.what();
            return;
        }
        try {
            if (opt.simulate) simulate_reduced(m, *run.input, *run.full, c);
            if (full1) m.level1 = relerr_sweep_1(*full1, m.model->system, run.grid1);
            if (full2) m.level2 = relerr_sweep_2(*full2, m.model->system, run.grid2, run.grid2);
        } catch (const std::exception& e) {
            m.stable = false;
            m.sim_note = e.what();
        }
    });
    return run;
}

/// File-name form of a method tag: SymInt(V,equi) -> SymInt_V_equi.
[[nodiscard]] inline std::string file_stem(const std::string& tag) {
    std::string out;
    for (char ch : tag) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-') {
            out.push_back(ch);
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

[[nodiscard]] inline std::filesystem::path output_dir() {
    const char* env = std::getenv("QBMOR_OUT_DIR");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("qbmor_out");
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw IOFailure("cannot open " + path.string() + " for writing");
    return os;
}

}  // namespace detail

/// models/<stem>/ per built model and reduce_summary.csv.
inline void write_models(const std::filesystem::path& out, const ExperimentRun& run) {
    auto os = detail::open_out(out / "reduce_summary.csv");
    os << "method,order,factorizations,solves,conditions,failed_conditions,status\n";
    for (const auto& m : run.methods) {
        if (!m.model) {
            os << csv_field(m.tag) << ",0,0,0,0,0," << csv_field("error: " + m.error) << "\n";
            continue;
        }
        const auto& red = *m.model;
        std::size_t failed = 0;
        for (const auto& chk : red.ledger) failed += chk.pass ? 0 : 1;
        save_reduced(out / "models" / file_stem(m.tag), red);
        os << csv_field(m.tag) << "," << red.system.n << "," << red.basis.work.factorizations << ","
           << red.basis.work.solves << "," << red.ledger.size() << "," << failed << ","
           << (failed == 0 ? "ok" : "self-check failed") << "\n";
    }
}

/// trajectories/full.csv, trajectories/<stem>.csv and time_errors.csv.
inline void write_trajectories(const std::filesystem::path& out, const ExperimentRun& run) {
    if (!run.full) return;
    std::filesystem::create_directories(out / "trajectories");
    write_trajectory_csv(out / "trajectories" / "full.csv", *run.full);
    auto os = detail::open_out(out / "time_errors.csv");
    os << "method,relerr_L2,relerr_Linf,stable\n";
    for (const auto& r : run.reports()) {
        os << csv_field(r.method_tag) << "," << format_full(r.relerr_L2) << "," << format_full(r.relerr_Linf)
           << "," << (r.stable ? 1 : 0) << "\n";
    }
    for (const auto& m : run.methods)
        if (m.trajectory) write_trajectory_csv(out / "trajectories" / (file_stem(m.tag) + ".csv"), *m.trajectory);
}

/// sweeps/level1_<stem>.csv (omega,relerr) and sweeps/level2_<stem>.csv
/// (omega1,omega2,relerr).
inline void write_sweeps(const std::filesystem::path& out, const ExperimentRun& run) {
    for (const auto& m : run.methods) {
        if (m.level1) {
            auto os = detail::open_out(out / "sweeps" / ("level1_" + file_stem(m.tag) + ".csv"));
            os << "omega,relerr\n";
            for (std::size_t i = 0; i < run.grid1.size(); ++i)
                os << format_full(run.grid1[i]) << "," << format_full(m.level1->relerr[i]) << "\n";
        }
        if (m.level2) {
            auto os = detail::open_out(out / "sweeps" / ("level2_" + file_stem(m.tag) + ".csv"));
            os << "omega1,omega2,relerr\n";
            const std::size_t n2 = run.grid2.size();
            for (std::size_t i = 0; i < n2; ++i)
                for (std::size_t j = 0; j < n2; ++j)
                    os << format_full(run.grid2[i]) << "," << format_full(run.grid2[j]) << ","
                       << format_full(m.level2->relerr[i * n2 + j]) << "\n";
        }
    }
}

inline void log_methods(std::ostream& log, const ExperimentRun& run) {
    for (const auto& m : run.methods) {
        if (!m.model) {
            log << m.tag << ": error: " << m.error << "\n";
            continue;
        }
        std::size_t failed = 0;
        for (const auto& chk : m.model->ledger) failed += chk.pass ? 0 : 1;
        log << m.tag << ": order " << m.model->system.n << ", " << m.model->ledger.size() << " conditions, " << failed
            << " failed";
        if (!m.sim_note.empty()) log << ", " << m.sim_note;
        log << "\n";
    }
}

/// Exit status of a run: 1 iff a guaranteed-condition self-check failed.
[[nodiscard]] inline int exit_status(const ExperimentRun& run) { return run.self_check_failed() ? 1 : 0; }

inline int cmd_reduce(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
    const auto run = run_experiment(c);
    write_models(out, run);
    log_methods(log, run);
    return exit_status(run);
}

inline int cmd_simulate(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
    const auto run = run_experiment(c, {true, false, false});
    write_trajectories(out, run);
    log_methods(log, run);
    return exit_status(run);
}

inline int cmd_sweep(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
    const auto run = run_experiment(c, {false, true, true});
    write_sweeps(out, run);
    log_methods(log, run);
    return exit_status(run);
}

inline int cmd_compare(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
    const auto run = run_experiment(c, {true, true, true});
    write_models(out, run);
    write_trajectories(out, run);
    write_sweeps(out, run);
    emit_table(run.reports(), (out / "table.csv").string());
    log_methods(log, run);
    print_table(log, run.reports());
    return exit_status(run);
}

}  // namespace qbmor
