#include "subtest/io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subtest {

using nlohmann::json;

namespace {

json require(const json& j, const char* key) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string("missing field '") + key + "'");
    return j.at(key);
}

} // namespace

json distribution_to_json(const ExplicitDistribution& p) {
    return json{{"n", p.size()}, {"probs", p.probs}};
}

ExplicitDistribution distribution_from_json(const json& j) {
    const int64_t n = require(j, "n").get<int64_t>();
    auto probs = require(j, "probs").get<std::vector<double>>();
    if (static_cast<int64_t>(probs.size()) != n)
        throw std::invalid_argument("distribution file: probs length does not match n");
    return make_distribution(std::move(probs));
}

void save_distribution(const std::string& path, const ExplicitDistribution& p) {
    save_json_file(path, distribution_to_json(p));
}

ExplicitDistribution load_distribution(const std::string& path) {
    return distribution_from_json(load_json_file(path));
}

json chain_to_json(const MarkovChain& m) {
    json rows = json::array();
    for (const auto& row : m.rows) {
        json entries = json::array();
        for (size_t k = 0; k < row.targets.size(); ++k)
            entries.push_back(json::array({row.targets[k] + 1, row.probs[k]}));
        rows.push_back(std::move(entries));
    }
    return json{{"n", m.n}, {"rows", std::move(rows)}};
}

MarkovChain chain_from_json(const json& j) {
    const int64_t n = require(j, "n").get<int64_t>();
    const json& rows_json = require(j, "rows");
    if (!rows_json.is_array() || static_cast<int64_t>(rows_json.size()) != n)
        throw std::invalid_argument("chain file: rows length does not match n");
    std::vector<std::vector<std::pair<int64_t, double>>> rows(n);
    for (int64_t u = 0; u < n; ++u) {
        for (const auto& entry : rows_json.at(u)) {
            if (!entry.is_array() || entry.size() != 2)
                throw std::invalid_argument("chain file: row entries must be [target, prob]");
            rows[u].push_back({entry.at(0).get<int64_t>() - 1, entry.at(1).get<double>()});
        }
    }
    return make_markov_chain(n, std::move(rows));
}

void save_chain(const std::string& path, const MarkovChain& m) {
    save_json_file(path, chain_to_json(m));
}

MarkovChain load_chain(const std::string& path) {
    return chain_from_json(load_json_file(path));
}

json fingerprint_to_json(const Fingerprint& f) {
    std::vector<std::pair<int64_t, int64_t>> cells;
    for (const auto& [cell, count] : f.entries)
        if (count != 0) cells.push_back(cell);
    std::sort(cells.begin(), cells.end(), fingerprint_cell_less);
    json entries = json::array();
    for (auto cell : cells)
        entries.push_back(json::array({cell.first, cell.second, f.entries.at(cell)}));
    return json{{"s", f.s}, {"entries", std::move(entries)}};
}

Fingerprint fingerprint_from_json(const json& j) {
    Fingerprint f;
    f.s = require(j, "s").get<int64_t>();
    for (const auto& entry : require(j, "entries")) {
        if (!entry.is_array() || entry.size() != 3)
            throw std::invalid_argument("fingerprint entries must be [i, j, count]");
        const int64_t i = entry.at(0).get<int64_t>();
        const int64_t jj = entry.at(1).get<int64_t>();
        const int64_t count = entry.at(2).get<int64_t>();
        if (i < 0 || jj < 0 || count < 0)
            throw std::invalid_argument("fingerprint entries must be nonnegative");
        if (count > 0) f.entries[{i, jj}] += count;
    }
    return f;
}

json verdict_to_json(const Verdict& v) {
    json out{
        {"decision", v.accept ? "accept" : "reject"},
        {"decided_by", v.decided_by},
        {"samples_consumed", v.samples_consumed},
    };
    if (!v.warning.empty()) out["warning"] = v.warning;
    if (v.phase1_samples > 0) out["phase1_samples"] = v.phase1_samples;
    if (v.subtest_samples > 0) out["subtest_samples"] = v.subtest_samples;
    if (!v.iterations.empty()) {
        json iters = json::array();
        for (const auto& it : v.iterations) {
            iters.push_back(json{
                {"m", it.counts.m},
                {"r_p", it.counts.r_p},
                {"r_q", it.counts.r_q},
                {"s_pq", it.counts.s_pq},
                {"statistic", it.statistic},
                {"threshold", it.threshold},
                {"rejected", it.rejected},
            });
        }
        out["iterations"] = std::move(iters);
    }
    if (v.decision_threshold > 0.0) {
        out["statistic"] = v.decision_statistic;
        out["threshold"] = v.decision_threshold;
    }
    auto one_indexed = [](const std::vector<int64_t>& xs) {
        json arr = json::array();
        for (int64_t x : xs) arr.push_back(x + 1);
        return arr;
    };
    if (!v.big_p.empty()) out["big_elements_p"] = one_indexed(v.big_p);
    if (!v.big_q.empty()) out["big_elements_q"] = one_indexed(v.big_q);
    return out;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json instance{{"kind", cfg.instance}};
    if (cfg.n > 0) instance["n"] = cfg.n;
    if (cfg.instance_param != 0.0) instance["param"] = cfg.instance_param;
    if (!cfg.p_path.empty()) instance["p"] = cfg.p_path;
    if (!cfg.q_path.empty()) instance["q"] = cfg.q_path;

    json out{
        {"tester", cfg.tester},
        {"instance", std::move(instance)},
        {"params",
         {{"epsilon", cfg.params.epsilon},
          {"delta", cfg.params.delta},
          {"c_m", cfg.params.c_m},
          {"c_big", cfg.params.c_big},
          {"c_norm", cfg.params.c_norm},
          {"c_iter", cfg.params.c_iter}}},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"parallelism", cfg.parallelism},
    };
    if (cfg.m_override > 0) out["params"]["m"] = cfg.m_override;
    json chain{{"kind", cfg.chain}};
    if (!cfg.chain_path.empty()) chain["path"] = cfg.chain_path;
    out["chain"] = std::move(chain);
    out["mixing"] = json{
        {"t", cfg.mixing.t},         {"epsilon", cfg.mixing.epsilon},
        {"delta", cfg.mixing.delta}, {"rho", cfg.mixing.rho},
        {"c_loops", cfg.mixing.c_loops}, {"c_rounds", cfg.mixing.c_rounds},
    };
    return out;
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.tester = require(j, "tester").get<std::string>();

    if (j.contains("instance")) {
        const json& inst = j.at("instance");
        cfg.instance = inst.value("kind", cfg.instance);
        cfg.n = inst.value("n", cfg.n);
        cfg.instance_param = inst.value("param", cfg.instance_param);
        cfg.p_path = inst.value("p", cfg.p_path);
        cfg.q_path = inst.value("q", cfg.q_path);
    }
    if (j.contains("chain")) {
        const json& chain = j.at("chain");
        cfg.chain = chain.value("kind", cfg.chain);
        cfg.chain_path = chain.value("path", cfg.chain_path);
        if (chain.contains("n")) cfg.n = chain.at("n").get<int64_t>();
    }
    if (j.contains("params")) {
        const json& p = j.at("params");
        cfg.params.epsilon = p.value("epsilon", cfg.params.epsilon);
        cfg.params.delta = p.value("delta", cfg.params.delta);
        cfg.params.c_m = p.value("c_m", cfg.params.c_m);
        cfg.params.c_big = p.value("c_big", cfg.params.c_big);
        cfg.params.c_norm = p.value("c_norm", cfg.params.c_norm);
        cfg.params.c_iter = p.value("c_iter", cfg.params.c_iter);
        cfg.m_override = p.value("m", cfg.m_override);
    }
    if (j.contains("mixing")) {
        const json& mx = j.at("mixing");
        cfg.mixing.t = mx.value("t", cfg.mixing.t);
        cfg.mixing.epsilon = mx.value("epsilon", cfg.params.epsilon);
        cfg.mixing.delta = mx.value("delta", cfg.params.delta);
        cfg.mixing.rho = mx.value("rho", cfg.mixing.rho);
        cfg.mixing.c_loops = mx.value("c_loops", cfg.mixing.c_loops);
        cfg.mixing.c_rounds = mx.value("c_rounds", cfg.mixing.c_rounds);
    } else {
        cfg.mixing.epsilon = cfg.params.epsilon;
        cfg.mixing.delta = cfg.params.delta;
    }
    cfg.mixing.closeness = cfg.params;

    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    return cfg;
}

json report_to_json(const ExperimentReport& r) {
    return json{
        {"config", experiment_config_to_json(r.config)},
        {"trials", r.trials},
        {"accepts", r.accepts},
        {"rejects", r.rejects},
        {"acceptance_rate", r.acceptance_rate},
        {"wilson_95", json::array({r.wilson_low, r.wilson_high})},
        {"oracle", {{"l1", r.oracle_l1}, {"l2", r.oracle_l2}}},
        {"samples",
         {{"total", r.samples_total},
          {"min", r.samples_min},
          {"max", r.samples_max},
          {"mean", r.samples_mean}}},
        {"wall_clock_seconds", r.wall_clock_seconds},
    };
}

std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
    std::ostringstream out;
    out << "tester,instance,chain,n,epsilon,delta,t,rho,trials,accepts,rejects,"
           "acceptance_rate,wilson_low,wilson_high,oracle_l1,oracle_l2,samples_mean,"
           "wall_clock_seconds\n";
    for (const auto& r : reports) {
        const auto& c = r.config;
        const bool markov = c.tester == "mixing" || c.tester == "almost-mixing" ||
                            c.tester == "test-mixing";
        out << c.tester << ',' << (markov ? "" : c.instance) << ','
            << (markov ? c.chain : "") << ',' << c.n << ','
            << (markov ? c.mixing.epsilon : c.params.epsilon) << ','
            << (markov ? c.mixing.delta : c.params.delta) << ',' << c.mixing.t << ','
            << c.mixing.rho << ',' << r.trials << ',' << r.accepts << ',' << r.rejects << ','
            << r.acceptance_rate << ',' << r.wilson_low << ',' << r.wilson_high << ','
            << r.oracle_l1 << ',' << r.oracle_l2 << ',' << r.samples_mean << ','
            << r.wall_clock_seconds << '\n';
    }
    return out.str();
}

std::string reports_to_table(const std::vector<ExperimentReport>& reports) {
    std::vector<std::array<std::string, 9>> rows;
    rows.push_back({"tester", "instance", "n", "epsilon", "trials", "accept_rate", "wilson_95",
                    "oracle_l1", "samples_mean"});
    auto fmt = [](double x) {
        std::ostringstream s;
        s << x;
        return s.str();
    };
    for (const auto& r : reports) {
        const auto& c = r.config;
        const bool markov = c.tester == "mixing" || c.tester == "almost-mixing" ||
                            c.tester == "test-mixing";
        std::ostringstream wilson;
        wilson << '[' << r.wilson_low << ", " << r.wilson_high << ']';
        rows.push_back({c.tester, markov ? c.chain : c.instance, std::to_string(c.n),
                        fmt(markov ? c.mixing.epsilon : c.params.epsilon),
                        std::to_string(r.trials), fmt(r.acceptance_rate), wilson.str(),
                        fmt(r.oracle_l1), fmt(r.samples_mean)});
    }
    std::array<size_t, 9> widths{};
    for (const auto& row : rows)
        for (size_t k = 0; k < row.size(); ++k) widths[k] = std::max(widths[k], row[k].size());
    std::ostringstream out;
    for (const auto& row : rows) {
        for (size_t k = 0; k < row.size(); ++k) {
            out << row[k] << std::string(widths[k] - row[k].size(), ' ');
            out << (k + 1 < row.size() ? "  " : "");
        }
        out << '\n';
    }
    return out.str();
}

bool has_sweep(const json& j) {
    return j.contains("sweep") && j.at("sweep").is_object() && !j.at("sweep").empty();
}

SweepGrid sweep_grid_from_json(const json& j) {
    SweepGrid grid;
    for (const auto& [axis, values] : j.at("sweep").items())
        grid.axes[axis] = values.get<std::vector<double>>();
    return grid;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

} // namespace subtest
