// Command-line front end:
//   loglab <experiment> [--config <file>] [--key value ...] [--out <dir>] [--seed <n>]
// Flag overrides win over the config file; the experiment may come from
// either place (the positional wins). Errors leave exit status 1 and one
// machine-readable "ERROR <code>: <message>" line on stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "loglab/error.hpp"
#include "loglab/experiments.hpp"
#include "loglab/version.hpp"

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        loglab::fail(loglab::ErrorCode::Io, "cannot read config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Flag overrides arrive as CLI11 extras in command-line order. Both
// "--key value" and "--key=value" spellings are accepted; a later
// assignment to the same key wins. The experiment name is not a CLI11
// positional on purpose: an unfilled positional would capture the value
// token that follows an unknown flag ("--nt 41" losing its "41").
void apply_overrides(const std::vector<std::string>& extras,
                     std::vector<std::pair<std::string, std::string>>& kv) {
    auto assign = [&](const std::string& key, const std::string& value) {
        for (auto& [k, v] : kv)
            if (k == key) {
                v = value;
                return;
            }
        kv.emplace_back(key, value);
    };
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() <= 2)
            loglab::fail(loglab::ErrorCode::ConfigParse,
                         "expected --key value, got '" + tok + "'");
        const std::string body = tok.substr(2);
        const std::size_t eq = body.find('=');
        if (eq != std::string::npos) {
            assign(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (i + 1 >= extras.size())
            loglab::fail(loglab::ErrorCode::ConfigParse,
                         "flag --" + body + " is missing its value");
        assign(body, extras[++i]);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(loglab::kToolName) +
                 ": log-expansion numerics, PDE residual audits and Monte "
                 "Carlo policy benchmarks"};
    app.allow_extras();
    app.usage("Usage: loglab [experiment] [--config <file>] [--key value ...] "
              "[--out <dir>] [--seed <n>]\n\nExperiments: expand-eval, "
              "remainder-audit, fit-function, fit-pde, pde-residual, "
              "heat-bench, rcd-bench, portfolio-bench");

    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    app.add_option("--config", config_path, "key=value config file");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (nonnegative)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR config-parse: " << e.what() << "\n";
        return 1;
    }

    try {
        std::vector<std::pair<std::string, std::string>> kv;
        if (!config_path.empty()) kv = loglab::parse_kv_text(read_text_file(config_path));
        std::vector<std::string> extras = app.remaining();
        std::string experiment;
        if (!extras.empty() && extras.front().rfind("--", 0) != 0) {
            experiment = extras.front();
            extras.erase(extras.begin());
        }
        apply_overrides(extras, kv);
        if (out_opt->count() > 0) {
            bool found = false;
            for (auto& [k, v] : kv)
                if (k == "out") {
                    v = out_dir;
                    found = true;
                }
            if (!found) kv.emplace_back("out", out_dir);
        }
        if (seed_opt->count() > 0) {
            if (seed < 0)
                loglab::fail(loglab::ErrorCode::TypeMismatch,
                             "value for key 'seed' must be nonnegative");
            bool found = false;
            for (auto& [k, v] : kv)
                if (k == "seed") {
                    v = std::to_string(seed);
                    found = true;
                }
            if (!found) kv.emplace_back("seed", std::to_string(seed));
        }

        std::string exp_name = experiment;
        if (exp_name.empty()) {
            for (const auto& [k, v] : kv)
                if (k == "experiment") exp_name = v;
        }
        if (exp_name.empty())
            loglab::fail(loglab::ErrorCode::ConfigParse,
                         "no experiment given (positional argument or "
                         "experiment= in the config file)");

        const loglab::RunConfig cfg =
            loglab::make_run_config(loglab::parse_experiment(exp_name), kv);
        const loglab::RunManifest man = loglab::run(cfg);
        std::cout << loglab::experiment_name(cfg.experiment) << ": wrote "
                  << man.files.size() << " file(s) + manifest to "
                  << man.output_dir.string() << "\n";
        return 0;
    } catch (const loglab::Error& e) {
        std::cerr << "ERROR " << loglab::error_code_name(e.code()) << ": "
                  << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR internal: " << e.what() << "\n";
        return 2;
    }
}
