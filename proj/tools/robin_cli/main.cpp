#include "commands.hpp"
#include "config.hpp"

#include <robin/errors.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace {

using namespace robin;
using namespace robin::cli;

struct CommonArgs {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::string scheme;
};

void add_common(CLI::App* sub, CommonArgs& a, bool config_required) {
    auto* copt = sub->add_option("--config", a.config, "experiment config file");
    if (config_required) copt->required();
    sub->add_option("--out", a.out, "output directory for CSV files");
    sub->add_option("--seed", a.seed, "seed override for noise and probe sampling");
    sub->add_option("--jobs", a.jobs, "bound on concurrent independent solves")
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--scheme", a.scheme, "time scheme override for parabolic runs")
        ->check(CLI::IsMember({"ie", "cn"}));
}

CliOverrides overrides_of(const CommonArgs& a) {
    CliOverrides ov;
    ov.seed = a.seed;
    if (a.scheme == "ie") ov.scheme = Scheme::ImplicitEuler;
    if (a.scheme == "cn") ov.scheme = Scheme::CrankNicolson;
    return ov;
}

RunConfig load(const CommonArgs& a) {
    const ConfigFile cf = ConfigFile::parse(a.config);
    return build_run_config(cf, overrides_of(a));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inverse Robin problems on an annulus: forward solves, sensitivities, "
                 "coefficient reconstruction, and stability probes"};
    app.require_subcommand(1);

    CommonArgs fwd_args, sens_args, rec_args, probe_args, cmp_args, check_args;
    bool corrupt_oracle = false;

    CLI::App* fwd = app.add_subcommand("forward", "solve the forward problem, write field and "
                                                  "outer trace CSVs");
    add_common(fwd, fwd_args, true);

    CLI::App* sens = app.add_subcommand("sensitivity", "solve the coefficient sensitivity system "
                                                       "and its measured outer trace");
    add_common(sens, sens_args, true);

    CLI::App* rec = app.add_subcommand("reconstruct", "recover the inner Robin coefficient from "
                                                      "synthesized outer data");
    add_common(rec, rec_args, true);

    CLI::App* probe = app.add_subcommand("probe", "sample coefficient pairs near gamma and "
                                                  "report stability ratios");
    add_common(probe, probe_args, true);

    CLI::App* cmp = app.add_subcommand("compare-bc", "linearized-map conditioning under the "
                                                     "three outer boundary conditions");
    add_common(cmp, cmp_args, true);

    CLI::App* check = app.add_subcommand("oracle-check", "closed-form consistency checks and "
                                                         "discretization order bands");
    add_common(check, check_args, false);
    check->add_flag("--corrupt-oracle", corrupt_oracle,
                    "test hook: break one closed-form target on purpose");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fwd->parsed()) return cmd_forward(load(fwd_args), fwd_args.out);
        if (sens->parsed()) return cmd_sensitivity(load(sens_args), sens_args.out);
        if (rec->parsed()) return cmd_reconstruct(load(rec_args), rec_args.out);
        if (probe->parsed())
            return cmd_probe(load(probe_args), probe_args.out, probe_args.jobs);
        if (cmp->parsed()) return cmd_compare_bc(load(cmp_args), cmp_args.out);
        if (check->parsed()) {
            if (check_args.config.empty())
                return cmd_oracle_check(nullptr, check_args.out, corrupt_oracle);
            const RunConfig rc = load(check_args);
            return cmd_oracle_check(&rc, check_args.out, corrupt_oracle);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 1;
    } catch (const IdentifiabilityError& e) {
        std::fprintf(stderr, "identifiability failure: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
