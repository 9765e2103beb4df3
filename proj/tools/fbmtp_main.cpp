#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbmtp/commands.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "flat key=value config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads, "worker thread count (0 = library default)");
    cmd->add_option("--seed", o.seed, "master seed override")->each([&o](const std::string&) {
        o.seed_given = true;
    });
    cmd->add_option("--set", o.sets, "override config entries, key=value")->take_all();
}

fbmtp::Config assemble(const CommonOpts& o) {
    fbmtp::Config cfg = fbmtp::Config::from_file(o.config_path);
    cfg.apply_env(); // FBMTP_<KEY> overrides the file
    for (const std::string& kv : o.sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw fbmtp::ConfigError("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed_given) cfg.set("master_seed", std::to_string(o.seed));
    if (o.threads > 0) cfg.set("threads", std::to_string(o.threads));
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"transport-process fractional SDE toolkit"};
    app.require_subcommand(1);

    CommonOpts gen_o, solve_o, val_o, conv_o;
    CLI::App* gen = app.add_subcommand("gen-fbm", "emit driver path CSVs");
    add_common(gen, gen_o);
    CLI::App* solve = app.add_subcommand("solve", "emit solution path CSVs on a chosen driver");
    add_common(solve, solve_o);
    CLI::App* val = app.add_subcommand("validate", "run the bound-checker battery");
    add_common(val, val_o);
    CLI::App* conv = app.add_subcommand("converge", "rate sweep and covariance experiment");
    add_common(conv, conv_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return fbmtp::cmd_gen_fbm(assemble(gen_o), gen_o.out_dir);
        if (solve->parsed()) return fbmtp::cmd_solve(assemble(solve_o), solve_o.out_dir);
        if (val->parsed()) return fbmtp::cmd_validate(assemble(val_o), val_o.out_dir);
        if (conv->parsed()) return fbmtp::cmd_converge(assemble(conv_o), conv_o.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
