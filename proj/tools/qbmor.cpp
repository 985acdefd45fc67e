#include <qbmor/experiment.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace {

std::string flag_name(const qbmor::ConfigKey& k) {
    std::string name = k.key;
    for (auto& ch : name)
        if (ch == '_') ch = '-';
    return "--" + name;
}

struct Invocation {
    std::string config;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
};

void add_run_options(CLI::App* cmd, Invocation& inv) {
    cmd->add_option("-c,--config", inv.config, "INI run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--set", inv.sets, "override as section.key=value (repeatable)");
    for (const auto& k : qbmor::config_keys()) {
        const std::string dotted = std::string(k.section) + "." + k.key;
        cmd->add_option_function<std::string>(
            flag_name(k), [&inv, dotted](const std::string& v) { inv.flags[dotted] = v; },
            std::string(k.help) + " [" + dotted + "]");
    }
}

std::vector<std::pair<std::string, std::string>> overrides(const Invocation& inv) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : inv.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw qbmor::ConfigError("--set expects section.key=value, got '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& kv : inv.flags) out.emplace_back(kv.first, kv.second);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-preserving interpolation of quadratic-bilinear systems.\n"
                 "Outputs go to $QBMOR_OUT_DIR (default ./qbmor_out)."};
    app.require_subcommand(1);

    using Command = int (*)(const qbmor::RunConfig&, const std::filesystem::path&, std::ostream&);
    const std::vector<std::tuple<const char*, const char*, Command>> commands{
        {"reduce", "build every configured reduced model and its self-check ledger", qbmor::cmd_reduce},
        {"simulate", "simulate full and reduced models under the shared GP input", qbmor::cmd_simulate},
        {"sweep", "level-1 and level-2 frequency error sweeps", qbmor::cmd_sweep},
        {"compare", "reduce, simulate, sweep and write the error table", qbmor::cmd_compare},
    };
    Invocation inv;
    std::vector<std::pair<CLI::App*, Command>> subs;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_run_options(sub, inv);
        subs.emplace_back(sub, fn);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = qbmor::load_run_config(inv.config, overrides(inv));
        const auto out = qbmor::output_dir();
        for (const auto& [sub, fn] : subs)
            if (sub->parsed()) return fn(cfg, out, std::cout);
    } catch (const qbmor::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
