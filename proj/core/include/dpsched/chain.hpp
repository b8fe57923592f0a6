#pragma once

#include "dpsched/linalg.hpp"
#include "dpsched/model.hpp"

#include <vector>

namespace dpsched {

// One-step transition probabilities of the queue length seen at the end of a
// slot.  Stored column-stochastic: lambda()(l, k) is the probability of moving
// from k to l, so the stationary vector satisfies lambda() * pi = pi.
class TransitionMatrix {
public:
    explicit TransitionMatrix(int states) : lam_(states, states) {}

    int states() const { return lam_.rows(); }
    double operator()(int from, int to) const { return lam_(to, from); }
    const Matrix& lambda() const { return lam_; }

private:
    friend TransitionMatrix build_chain(const ValidatedSpec&, const Policy&);
    Matrix lam_;
};

// Closed-form probability of moving up by m from k, with f beyond K taken as 0.
// Matches build_chain on every transition that cannot touch the buffer limit.
double forward_prob(const ValidatedSpec& spec, const Policy& policy, int k, int m);

// Closed-form probability of moving down by one from k >= 1.
double backward_prob(const ValidatedSpec& spec, const Policy& policy, int k);

// Chain of the clipped dynamics: t = min(q + a, K), one packet leaves with
// probability f(t, h), q' = t - s.
TransitionMatrix build_chain(const ValidatedSpec& spec, const Policy& policy);

struct StationaryDist {
    std::vector<double> pi;
};

// Closed communicating classes, each as a sorted list of states.
std::vector<std::vector<int>> closed_classes(const TransitionMatrix& tau);

// Stationary vector by subtraction-free elimination on the closed class;
// transient states get zero mass.
// Throws SingularSystemError when the chain has more than one closed class.
StationaryDist stationary(const TransitionMatrix& tau);

struct Metrics {
    double delay = 0.0;     // slots, avg_queue / abar
    double power = 0.0;     // energy per slot
    double avg_queue = 0.0; // packets
    double overflow = 0.0;  // packets dropped per slot at the buffer limit
};

Metrics metrics(const ValidatedSpec& spec, const Policy& policy, const StationaryDist& pi);

// Pr{t = k}: distribution of the post-arrival queue, k = 0..K.  The K entry
// collects every burst that would overflow.
std::vector<double> decision_state_probs(const ValidatedSpec& spec, const std::vector<double>& pi);

struct ChainAnalysis {
    StationaryDist pi;
    Metrics metrics;
};

ChainAnalysis analyze(const ValidatedSpec& spec, const Policy& policy);

} // namespace dpsched
