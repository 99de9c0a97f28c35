// waylab command-line front end.

#include "waylab/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    using namespace waylab;
    CLI::App app{"waylab: finite-dimensional measurement, conservation and reference-frame experiments"};
    app.require_subcommand(1);

    RunConfig cfg;
    double tol = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "output file (default stdout)");
        sub->add_option("--seed", cfg.seed, "seed for randomized parts");
        sub->add_option("--tol", tol, "tolerance override");
    };
    auto model_opts = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model, "built-in model family");
        sub->add_option("--n", cfg.n, "lattice / reference dimension");
        sub->add_option("--lam-index", cfg.lam_index, "coupling index k (lambda = 2 pi k / n)");
        sub->add_option("--reading", cfg.reading, "ozawa_lattice target: absolute or relative");
    };

    auto* audit = app.add_subcommand("audit", "audit a scheme against its target and conserved pair");
    audit->add_option("--scheme", cfg.scheme_path, "scheme JSON file");
    model_opts(audit);
    common(audit);

    auto* sweep = app.add_subcommand("sweep", "error versus spread sweep");
    model_opts(sweep);
    sweep->add_option("--budgets", cfg.budgets, "budgets, a..b or a,b,c")->required();
    sweep->add_option("--eps", cfg.eps, "overall-width parameter");
    common(sweep);

    auto* bound = app.add_subcommand("bound", "noise-operator bound on a grid of input states");
    bound->add_option("--scheme", cfg.scheme_path, "scheme JSON file");
    model_opts(bound);
    bound->add_option("--states", cfg.states, "state grid, gridK");
    common(bound);

    auto* rel = app.add_subcommand("relativise", "relativisation demos");
    rel->add_option("--demo", cfg.demo, "z2, position or rotor");
    rel->add_option("--n", cfg.n, "group order");
    common(rel);

    auto* search = app.add_subcommand("search", "randomized search for WAY counterexamples");
    search->add_option("--trials", cfg.trials, "number of random schemes");
    common(search);

    auto* exp = app.add_subcommand("export", "write a built-in model as a scheme JSON file");
    model_opts(exp);
    common(exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (*audit) cfg.command = Command::audit;
    if (*sweep) cfg.command = Command::sweep;
    if (*bound) cfg.command = Command::bound;
    if (*rel) cfg.command = Command::relativise;
    if (*search) cfg.command = Command::search;
    if (*exp) cfg.command = Command::export_model;
    for (auto* sub : {audit, sweep, bound, rel, search, exp})
        if (sub->count("--tol") > 0) cfg.tol = tol;
    return run(cfg);
}
