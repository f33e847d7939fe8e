#include "commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

using namespace rk4::cli;

int main(int argc, char** argv)
{
    CLI::App app{"rk4cli: special divisors, 4-rank predictions, experiments and verifiers"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Print machine-readable JSON");
    app.fallthrough();

    std::function<Result()> action;

    std::uint64_t D = 0;
    auto* sd = app.add_subcommand("special-divisors", "List S(D) and check the kernel method against brute force");
    sd->add_option("--D", D, "Odd squarefree D")->required();
    sd->callback([&] { action = [&] { return cmd_special_divisors(D); }; });

    auto* predict = app.add_subcommand("predict", "Evaluate a predicted law");
    predict->require_subcommand(1);
    predict->fallthrough();
    std::uint64_t n1 = 1, n2 = 1, c = 1;
    int j = 0, j1 = 0, j2 = 0;
    std::string image, split, kspec, mode = "unramified";
    unsigned p = 3;

    auto* pair = predict->add_subcommand("pair", "Mass of (dim S(D)/{1,D}, Im phi)");
    pair->add_option("--n1", n1)->required();
    pair->add_option("--n2", n2);
    pair->add_option("--j", j)->required();
    pair->add_option("--image", image, "Comma-separated 0/1 basis vectors, or 'full'");
    pair->callback([&] { action = [&] { return cmd_predict_pair(n1, n2, j, image); }; });

    auto* joint = predict->add_subcommand("joint-4rank", "Mass of (rk4 Cl(K), rk4 Cl(K,c))");
    joint->add_option("--c", c)->required();
    joint->add_option("--split", split, "Comma-separated primes of c that split (the rest are inert)");
    joint->add_option("--j1", j1)->required();
    joint->add_option("--j2", j2)->required();
    joint->callback([&] { action = [&] { return cmd_predict_joint(c, split, j1, j2); }; });

    auto* moment = predict->add_subcommand("moment", "Predicted mixed moment of m_chi");
    moment->add_option("--n1", n1)->required();
    moment->add_option("--n2", n2);
    moment->add_option("--k", kspec, "Exponents as chi:e pairs, e.g. chi5:1,1:2")->required();
    moment->callback([&] { action = [&] { return cmd_predict_moment(n1, n2, kspec); }; });

    auto* avg = predict->add_subcommand("p-average", "Predicted average of #Cl(K,c)[p]");
    avg->add_option("--p", p)->required();
    avg->add_option("--c", c)->required();
    avg->add_option("--mode", mode, "unramified or all");
    avg->callback([&] { action = [&] { return cmd_predict_average(p, c, mode); }; });

    ExperimentOptions eo;
    auto* exp = app.add_subcommand("experiment", "Empirical moments and (dim, Im phi) frequencies");
    exp->add_option("--X", eo.X, "Range bound (accepts 1e7)")->required();
    exp->add_option("--q", eo.q)->required();
    exp->add_option("--a", eo.a)->required();
    exp->add_option("--n1", eo.n1);
    exp->add_option("--n2", eo.n2);
    exp->add_option("--k", eo.k, "k-vector as chi:e pairs; repeatable (default: each character once)");
    exp->add_option("--shards", eo.shards, "Worker threads");
    exp->add_option("--block-size", eo.block_size, "D-range block size");
    exp->add_option("--checkpoint", eo.checkpoint, "Checkpoint file written after every block");
    exp->add_flag("--resume", eo.resume, "Continue from the checkpoint file if present");
    exp->add_option("--csv", eo.csv, "Also write one CSV row per outcome");
    exp->add_flag("--omit-timing", eo.omit_timing, "Leave runtime_ms out of the report");
    exp->callback([&] { action = [&] { return cmd_experiment(eo); }; });

    auto* verify = app.add_subcommand("verify", "Check an identity; exit 3 on failure");
    verify->require_subcommand(1);
    verify->fallthrough();
    int k = 1, max_rank = 12, plus = -1, minus = -1;
    bool slow = false;
    std::uint64_t Dmax = 2000;

    auto* comb = verify->add_subcommand("combinatorics", "Stable unlinked set identity");
    comb->add_option("--k", k)->required();
    comb->add_flag("--slow", slow, "Allow k = 3");
    comb->callback([&] { action = [&] { return cmd_verify_combinatorics(k, slow); }; });

    auto* pj = verify->add_subcommand("prop-just", "Average p-torsion over groups against the closed form");
    pj->add_option("--p", p)->required();
    pj->add_option("--max-rank", max_rank);
    pj->add_option("--plus", plus, "Dimension of the plus part");
    pj->add_option("--minus", minus, "Dimension of the minus part");
    pj->callback([&] { action = [&] { return cmd_verify_prop_just(p, max_rank, plus, minus); }; });

    auto* inv = verify->add_subcommand("inversion", "Moment inversion round trips");
    inv->callback([&] { action = [&] { return cmd_verify_inversion(); }; });

    auto* orc = verify->add_subcommand("oracle", "Ray class group 4-ranks against the explicit relation");
    orc->add_option("--Dmax", Dmax)->required();
    orc->add_option("--c", c)->required();
    orc->callback([&] { action = [&] { return cmd_verify_oracle(Dmax, c); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        Result r = action();
        print_result(r, as_json);
        return r.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
