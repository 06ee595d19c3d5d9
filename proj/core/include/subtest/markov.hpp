#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "subtest/closeness.hpp"
#include "subtest/distribution.hpp"

namespace subtest {

// Endpoint distribution of a random walk; same invariants as any
// probability vector.
using StateDistribution = ExplicitDistribution;

// Sparse row-stochastic transition matrix. Each row keeps its nonzero
// targets sorted, plus cumulative sums for the successor oracle.
struct MarkovChain {
    struct Row {
        std::vector<int64_t> targets;
        std::vector<double> probs;
        std::vector<double> cum;
    };

    int64_t n = 0;
    std::vector<Row> rows;

    int64_t max_row_nnz() const;
    int64_t nnz() const;
};

// Validates: every row nonempty with strictly increasing in-range targets,
// row sums within 1e-9 of one. Throws std::invalid_argument otherwise.
MarkovChain make_markov_chain(int64_t n,
                              std::vector<std::vector<std::pair<int64_t, double>>> rows);

// Successor oracle: returns v with probability M(u, v), by binary search
// over the row's cumulative sums. O(log d) per draw.
int64_t next_node(const MarkovChain& m, int64_t u, Rng& rng);

// Alias-table successor oracle behind the same contract; O(1) per draw.
// Draw streams differ from next_node per seed, distributions match.
class AliasWalker {
public:
    explicit AliasWalker(const MarkovChain& m);
    int64_t next(int64_t u, Rng& rng) const;

private:
    std::vector<AliasTable> tables_;
    std::vector<std::vector<int64_t>> targets_;
};

// Endpoint of a t-step random walk from u; t = 0 returns u.
int64_t walk(const MarkovChain& m, int64_t u, int64_t t, Rng& rng);

// Black-box samplers for the walk-endpoint distributions.
SamplerHandle state_walk_sampler(const MarkovChain& m, int64_t u, int64_t t);
// Draws a uniformly random start state, then walks t steps: the average
// t-step distribution.
SamplerHandle average_t_step_sampler(const MarkovChain& m, int64_t t);

// Exact oracles via repeated sparse vector-matrix products.
StateDistribution exact_t_step(const MarkovChain& m, int64_t u, int64_t t);
StateDistribution exact_average_t_step(const MarkovChain& m, int64_t t);

struct MixingParams {
    int64_t t = 1;        // walk length
    double epsilon = 0.0; // closeness parameter
    double delta = 0.0;   // failure probability (figure-4/5 testers)
    double rho = 0.1;     // almost-mixing fraction
    double c_loops = 4.0;  // walk/start counts: ceil(c_loops / epsilon)
    double c_rounds = 0.35; // almost-mixing rounds: ceil(c_rounds ln(1/delta) / rho)
    TestParams closeness;  // constants for the sampling closeness tester

    void validate(int64_t n) const;
};

// Closeness decision procedure between the walk distribution e_u M^tau and
// the average t_ref-step distribution. Injectable so the orchestration can
// run against either the sampling l1 tester or the exact oracles.
using StateClosenessTester =
    std::function<Verdict(const MarkovChain& m, int64_t u, int64_t tau, int64_t t_ref,
                          double epsilon, double delta, Rng& rng)>;

// The real thing: l1_distance_test on (walk sampler, average sampler).
StateClosenessTester sampling_closeness_tester(const TestParams& base);

// Exact-oracle stand-in: accepts iff the true l1 distance is <= epsilon.
// Never errs; for orchestration tests and calibration.
StateClosenessTester oracle_closeness_tester();

// Tests every state's t-step distribution against the average t-step
// distribution at confidence delta/n; rejects on the first failing state.
Verdict mixing_test(const MarkovChain& m, const MixingParams& params,
                    const StateClosenessTester& closeness, Rng& rng);

// Tests uniformly random states over ceil(c_rounds ln(1/delta) / rho)
// rounds at confidence delta * rho each.
Verdict almost_mixing_test(const MarkovChain& m, const MixingParams& params,
                           const StateClosenessTester& closeness, Rng& rng);

// Property tester: picks ceil(c_loops/eps) start states uniformly and as
// many from the average t-step distribution; from each start, walks
// ceil(c_loops/eps) independent 2t-step walks testing every visited node at
// confidence 1/(6t), plus the horizon checks tau = t..2t at confidence
// 1/(3t). Accepting chains are close to a (4 eps, 2t)-mixing chain.
Verdict property_mixing_test(const MarkovChain& m, const MixingParams& params,
                             const StateClosenessTester& closeness, Rng& rng);

enum class StateClass { Smooth, Normal, Bad };

// Exact classification via the matrix-power oracles. Normal: t-step
// distribution within epsilon of the average in l1. Smooth: within epsilon
// at every horizon tau in [t, 2t] and the probability that a 2t-step walk
// visits a Bad state (computed by absorbing-state dynamic programming) is
// at most epsilon.
std::vector<StateClass> classify_states_exact(const MarkovChain& m, int64_t t, double epsilon);
StateClass classify_state_exact(const MarkovChain& m, int64_t u, int64_t t, double epsilon);

// Probability that a 2t-step walk from each state visits a state in `bad`.
std::vector<double> bad_visit_probability(const MarkovChain& m,
                                          const std::vector<uint8_t>& bad, int64_t steps);

// Repair transformation: every Bad row is replaced by a deterministic jump
// to the lowest-indexed Smooth state. Throws when no Smooth state exists.
MarkovChain repair_chain(const MarkovChain& m, int64_t t, double epsilon);

struct ChainDelta {
    double entry_fraction = 0.0; // differing entries over d * n
    double avg_dist = 0.0;       // l1 between the average t-step distributions
};

ChainDelta chain_delta(const MarkovChain& m1, const MarkovChain& m2, int64_t t);

} // namespace subtest
