// subtest: sublinear distribution closeness and Markov mixing testers.
//
// Exit codes: 0 accept/success, 1 reject, 2 usage or I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subtest/harness.hpp"
#include "subtest/io.hpp"

namespace {

using nlohmann::json;
using namespace subtest;

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;

struct SeedOption {
    uint64_t value = 0;
    bool given = false;

    // Omitted seeds come from OS entropy; either way the seed used is
    // echoed in the output.
    uint64_t resolve() {
        if (!given) {
            std::random_device entropy;
            value = (static_cast<uint64_t>(entropy()) << 32) ^ entropy();
        }
        return value;
    }
};

void add_seed_option(CLI::App* cmd, SeedOption& seed) {
    cmd->add_option("--seed", seed.value, "RNG seed (default: OS entropy, echoed in output)")
        ->each([&seed](const std::string&) { seed.given = true; });
}

void add_constant_options(CLI::App* cmd, TestParams& params) {
    cmd->add_option("--c-m", params.c_m, "l2 sample-size constant");
    cmd->add_option("--c-big", params.c_big, "l1 phase-1 sample-size constant");
    cmd->add_option("--c-norm", params.c_norm, "norm-estimator sample-size constant");
    cmd->add_option("--c-iter", params.c_iter, "repetition constant");
}

json params_json(const TestParams& p) {
    return json{{"epsilon", p.epsilon}, {"delta", p.delta},   {"c_m", p.c_m},
                {"c_big", p.c_big},     {"c_norm", p.c_norm}, {"c_iter", p.c_iter}};
}

void print_result(const json& j) { std::cout << j.dump(2) << std::endl; }

int verdict_exit(const Verdict& v, json result) {
    result.update(verdict_to_json(v));
    print_result(result);
    return v.accept ? kExitAccept : kExitReject;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sublinear distribution closeness and Markov mixing testers"};
    app.require_subcommand(1);

    // --- exact ----------------------------------------------------------
    auto* exact = app.add_subcommand("exact", "exact oracles over explicit distributions");
    exact->require_subcommand(1);
    std::string exact_p, exact_q;
    struct ExactSpec {
        const char* name;
        const char* help;
        bool needs_q;
    };
    for (ExactSpec spec : {ExactSpec{"l1", "l1 distance", true}, ExactSpec{"l2", "l2 distance", true},
                           ExactSpec{"linf", "max element probability", false},
                           ExactSpec{"collision", "collision probability p.q", true}}) {
        auto* cmd = exact->add_subcommand(spec.name, spec.help);
        cmd->add_option("--p", exact_p, "distribution JSON file")->required();
        auto* qopt = cmd->add_option("--q", exact_q, "distribution JSON file");
        if (spec.needs_q) qopt->required();
    }

    // --- l2 ---------------------------------------------------------------
    auto* l2 = app.add_subcommand("l2", "collision-statistic closeness test in l2 norm");
    std::string l2_p, l2_q;
    TestParams l2_params;
    int64_t l2_m = 0;
    SeedOption l2_seed;
    l2->add_option("--p", l2_p, "distribution JSON file")->required();
    l2->add_option("--q", l2_q, "distribution JSON file")->required();
    l2->add_option("--eps", l2_params.epsilon, "distance parameter")->required();
    l2->add_option("--delta", l2_params.delta, "failure probability")->required();
    l2->add_option("--m", l2_m, "per-round sample size (default: derived from max weights)");
    add_seed_option(l2, l2_seed);
    add_constant_options(l2, l2_params);

    // --- l1 ---------------------------------------------------------------
    auto* l1 = app.add_subcommand("l1", "two-phase closeness test in l1 norm");
    std::string l1_p, l1_q;
    TestParams l1_params;
    SeedOption l1_seed;
    l1->add_option("--p", l1_p, "distribution JSON file")->required();
    l1->add_option("--q", l1_q, "distribution JSON file")->required();
    l1->add_option("--eps", l1_params.epsilon, "distance parameter")->required();
    l1->add_option("--delta", l1_params.delta, "failure probability")->required();
    add_seed_option(l1, l1_seed);
    add_constant_options(l1, l1_params);

    // --- uniformity ---------------------------------------------------------
    auto* unif = app.add_subcommand("uniformity", "closeness to uniform in l1 norm");
    std::string unif_p;
    TestParams unif_params;
    SeedOption unif_seed;
    unif->add_option("--p", unif_p, "distribution JSON file")->required();
    unif->add_option("--eps", unif_params.epsilon, "distance parameter")->required();
    unif->add_option("--delta", unif_params.delta, "failure probability")->required();
    add_seed_option(unif, unif_seed);
    add_constant_options(unif, unif_params);

    // --- markov testers ------------------------------------------------------
    struct MarkovCli {
        CLI::App* cmd = nullptr;
        std::string chain_path;
        MixingParams params;
        SeedOption seed;
    };
    MarkovCli markov_cli[3];
    const char* markov_names[3] = {"mixing", "almost-mixing", "test-mixing"};
    const char* markov_help[3] = {
        "test every state's t-step distribution against the average",
        "test random states' t-step distributions against the average",
        "property-test closeness to a mixing chain",
    };
    for (int k = 0; k < 3; ++k) {
        auto& mc = markov_cli[k];
        mc.cmd = app.add_subcommand(markov_names[k], markov_help[k]);
        mc.cmd->add_option("--chain", mc.chain_path, "chain JSON file")->required();
        mc.cmd->add_option("--t", mc.params.t, "walk length")->required();
        mc.cmd->add_option("--eps", mc.params.epsilon, "closeness parameter")->required();
        mc.cmd->add_option("--delta", mc.params.delta, "failure probability")->required();
        mc.cmd->add_option("--rho", mc.params.rho, "almost-mixing fraction");
        mc.cmd->add_option("--c-loops", mc.params.c_loops, "walk/start count constant");
        mc.cmd->add_option("--c-rounds", mc.params.c_rounds, "almost-mixing round constant");
        add_seed_option(mc.cmd, mc.seed);
        add_constant_options(mc.cmd, mc.params.closeness);
    }

    // --- gen -----------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "write extremal instance files");
    gen->require_subcommand(1);
    auto* gen_hl = gen->add_subcommand("heavy-light", "shared-heavy disjoint-light pair");
    int64_t gen_n = 0;
    std::string gen_out_p = "heavy_light_p.json", gen_out_q = "heavy_light_q.json";
    gen_hl->add_option("--n", gen_n, "domain size (perfect cube divisible by 4)")->required();
    gen_hl->add_option("--out-p", gen_out_p, "output file for p");
    gen_hl->add_option("--out-q", gen_out_q, "output file for q");
    auto* gen_coin = gen->add_subcommand("coin", "fair against biased two-element pair");
    double gen_eps = 0.0;
    std::string coin_out_p = "coin_p.json", coin_out_q = "coin_q.json";
    gen_coin->add_option("--eps", gen_eps, "l2 distance of the pair")->required();
    gen_coin->add_option("--out-p", coin_out_p, "output file for p");
    gen_coin->add_option("--out-q", coin_out_q, "output file for q");

    // --- experiment ------------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "Monte Carlo acceptance-rate experiments");
    std::string exp_config, exp_out, exp_csv;
    exp->add_option("--config", exp_config, "experiment config JSON file")->required();
    exp->add_option("--out", exp_out, "report output JSON file");
    exp->add_option("--csv", exp_csv, "CSV export file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (exact->parsed()) {
            const std::string op = exact->get_subcommands().front()->get_name();
            ExplicitDistribution p = load_distribution(exact_p);
            double value = 0.0;
            json result{{"op", "exact." + op}, {"p", exact_p}};
            if (op == "linf") {
                value = exact_linf(p);
            } else {
                ExplicitDistribution q = load_distribution(exact_q);
                result["q"] = exact_q;
                value = op == "l1"   ? exact_l1_distance(p, q)
                        : op == "l2" ? exact_l2_distance(p, q)
                                     : exact_collision_probability(p, q);
            }
            result["value"] = value;
            print_result(result);
            return kExitAccept;
        }

        if (l2->parsed()) {
            ExplicitDistribution p = load_distribution(l2_p);
            ExplicitDistribution q = load_distribution(l2_q);
            if (l2_m == 0) {
                double b = std::max(exact_linf(p), exact_linf(q));
                l2_m = required_m_l2(b, l2_params.epsilon, l2_params.c_m);
            }
            Rng rng(l2_seed.resolve());
            Verdict v = l2_distance_test(make_sampler(p), make_sampler(q), l2_m, l2_params, rng);
            json result{{"op", "l2"},       {"p", l2_p},
                        {"q", l2_q},        {"seed", l2_seed.value},
                        {"m", l2_m},        {"params", params_json(l2_params)}};
            return verdict_exit(v, std::move(result));
        }

        if (l1->parsed()) {
            ExplicitDistribution p = load_distribution(l1_p);
            ExplicitDistribution q = load_distribution(l1_q);
            Rng rng(l1_seed.resolve());
            Verdict v = l1_distance_test(make_sampler(p), make_sampler(q), l1_params, rng);
            json result{{"op", "l1"},
                        {"p", l1_p},
                        {"q", l1_q},
                        {"seed", l1_seed.value},
                        {"params", params_json(l1_params)}};
            return verdict_exit(v, std::move(result));
        }

        if (unif->parsed()) {
            ExplicitDistribution p = load_distribution(unif_p);
            Rng rng(unif_seed.resolve());
            Verdict v = uniformity_test(make_sampler(p), unif_params, rng);
            json result{{"op", "uniformity"},
                        {"p", unif_p},
                        {"seed", unif_seed.value},
                        {"params", params_json(unif_params)}};
            return verdict_exit(v, std::move(result));
        }

        for (int k = 0; k < 3; ++k) {
            auto& mc = markov_cli[k];
            if (!mc.cmd->parsed()) continue;
            MarkovChain chain = load_chain(mc.chain_path);
            Rng rng(mc.seed.resolve());
            StateClosenessTester closeness = sampling_closeness_tester(mc.params.closeness);
            Verdict v = k == 0   ? mixing_test(chain, mc.params, closeness, rng)
                        : k == 1 ? almost_mixing_test(chain, mc.params, closeness, rng)
                                 : property_mixing_test(chain, mc.params, closeness, rng);
            json result{{"op", markov_names[k]},
                        {"chain", mc.chain_path},
                        {"seed", mc.seed.value},
                        {"params",
                         {{"t", mc.params.t},
                          {"epsilon", mc.params.epsilon},
                          {"delta", mc.params.delta},
                          {"rho", mc.params.rho},
                          {"c_loops", mc.params.c_loops},
                          {"c_rounds", mc.params.c_rounds},
                          {"closeness", params_json(mc.params.closeness)}}}};
            return verdict_exit(v, std::move(result));
        }

        if (gen->parsed()) {
            const bool heavy = gen_hl->parsed();
            InstancePair pair = heavy ? heavy_light_pair(gen_n) : biased_coin_pair(gen_eps);
            const std::string& out_p = heavy ? gen_out_p : coin_out_p;
            const std::string& out_q = heavy ? gen_out_q : coin_out_q;
            save_distribution(out_p, pair.p);
            save_distribution(out_q, pair.q);
            print_result(json{{"op", heavy ? "gen.heavy-light" : "gen.coin"},
                              {"n", pair.p.size()},
                              {"p", out_p},
                              {"q", out_q},
                              {"exact_l1", pair.exact_l1},
                              {"exact_l2", pair.exact_l2}});
            return kExitAccept;
        }

        if (exp->parsed()) {
            json config_json = load_json_file(exp_config);
            ExperimentConfig base = experiment_config_from_json(config_json);
            std::vector<ExperimentReport> reports;
            if (has_sweep(config_json)) {
                reports = sweep(base, sweep_grid_from_json(config_json));
            } else {
                reports.push_back(run_experiment(base));
            }
            json out = json::array();
            for (const auto& r : reports) out.push_back(report_to_json(r));
            if (reports.size() == 1) out = out.front();
            if (!exp_out.empty()) {
                save_json_file(exp_out, out);
                std::ofstream table(exp_out + ".txt");
                table << reports_to_table(reports);
            }
            if (!exp_csv.empty()) {
                std::ofstream csv(exp_csv);
                csv << reports_to_csv(reports);
            }
            print_result(out);
            return kExitAccept;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    }

    std::cerr << "error: no subcommand" << std::endl;
    return kExitUsage;
}
