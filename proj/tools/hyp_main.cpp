#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hyp/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"quantitative hyperbolic dynamics toolkit"};
    app.require_subcommand(0, 1);

    hyp::RunConfig cfg;
    for (int i = 0; i < argc; ++i) cfg.argv_echo.emplace_back(argv[i]);
    if (!cfg.argv_echo.empty()) cfg.argv_echo[0] = hyp::TOOL_NAME;

    const std::vector<std::string> subs = {
        "constants", "splitting", "manifold",       "bracket",  "shadow",
        "close",     "specify",   "partition",      "matrix",   "entropy",
        "count-periodic", "decode", "itinerary",    "verify",   "reproduce-horseshoe"};

    std::vector<CLI::App*> apps;
    for (const auto& name : subs) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--model", cfg.model, "builtin name or model file");
        sub->add_option("--matrix", cfg.matrix_file, "transition matrix file");
        sub->add_option("--input", cfg.input, "input artifact (orbit or partition csv)");
        sub->add_option("--out", cfg.out, "output file (default stdout)");
        sub->add_option("--format", cfg.format, "json or csv");
        sub->add_option("--x", cfg.x, "point x coordinate");
        sub->add_option("--y", cfg.y, "point y coordinate");
        auto* x2 = sub->add_option("--x2", cfg.x2, "second point x");
        auto* y2 = sub->add_option("--y2", cfg.y2, "second point y");
        sub->add_option("--delta", cfg.delta, "accuracy / chart size");
        sub->add_option("--beta", cfg.beta, "shadowing radius");
        sub->add_option("--alpha", cfg.alpha, "pseudo-orbit tolerance / noise amplitude");
        sub->add_option("--gamma", cfg.gamma, "net density for cover construction");
        sub->add_option("--eps", cfg.eps, "tracking / diameter tolerance");
        sub->add_option("--N", cfg.N, "window half-width, period, or gap length");
        sub->add_option("--k", cfg.k, "refinement depth");
        sub->add_option("--length", cfg.length, "orbit length");
        sub->add_option("--amplitude", cfg.amplitude, "noise amplitude");
        sub->add_option("--word", cfg.word, "symbol word (digit string)");
        sub->add_option("--offset", cfg.offset, "word start time");
        sub->add_flag("--periodic", cfg.periodic, "treat word/orbit as periodic");
        sub->add_flag("--unstable", cfg.unstable, "unstable manifold instead of stable");
        sub->add_option("--segments", cfg.segments, "specification segments x,y,len;...");
        sub->add_option("--samples", cfg.samples, "sample count for audits");
        sub->add_option("--seed", cfg.seed, "rng seed");
        sub->add_option("--jobs", cfg.jobs, "parallel fan-out");
        sub->callback([&cfg, name, x2, y2]() {
            cfg.subcommand = name;
            cfg.have_point2 = x2->count() > 0 && y2->count() > 0;
        });
        apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return hyp::run(cfg, std::cout, std::cerr);
}
