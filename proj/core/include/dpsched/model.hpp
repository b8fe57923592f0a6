#pragma once

#include <cstddef>
#include <vector>

namespace dpsched {

// Raw, unvalidated problem description.  Channel states are stored worst
// first: index 0 is the channel that needs the most power.
struct SystemSpec {
    std::vector<double> arrival_probs;  // theta_0..theta_M
    std::vector<double> channel_probs;  // eta_1..eta_W
    std::vector<double> channel_powers; // P_1 > ... > P_W > 0
    int capacity = 0;                   // K
};

// A SystemSpec that passed validate_spec.  Only validate_spec can make one.
class ValidatedSpec {
public:
    int K() const { return capacity_; }
    int M() const { return static_cast<int>(theta_.size()) - 1; }
    int W() const { return static_cast<int>(eta_.size()); }

    // theta(m) is 0 outside 0..M.
    double theta(int m) const { return m < 0 || m > M() ? 0.0 : theta_[m]; }
    double eta(int w) const { return eta_[w]; }
    double power(int w) const { return power_[w]; }
    double mean_arrival() const { return mean_; }

    // Pr{a >= m}
    double arrival_tail(int m) const;

    const std::vector<double>& arrival_probs() const { return theta_; }
    const std::vector<double>& channel_probs() const { return eta_; }
    const std::vector<double>& channel_powers() const { return power_; }

    SystemSpec raw() const { return {theta_, eta_, power_, capacity_}; }

private:
    friend ValidatedSpec validate_spec(const SystemSpec&);
    ValidatedSpec() = default;

    std::vector<double> theta_;
    std::vector<double> eta_;
    std::vector<double> power_;
    int capacity_ = 0;
    double mean_ = 0.0;
};

// Checks every invariant of SystemSpec.  Probability vectors that miss 1 by
// less than 1e-12 are renormalised; trailing zero arrival probabilities are
// trimmed so M is the largest burst that can actually occur.
ValidatedSpec validate_spec(const SystemSpec& spec);

// f(k, w): probability of sending one packet when the post-arrival queue
// holds k packets and the channel is in state w.  Row 0 is always zero.
class Policy {
public:
    Policy() = default;
    Policy(int K, int W);

    int K() const { return K_; }
    int W() const { return W_; }

    double operator()(int k, int w) const { return f_[index(k, w)]; }
    void set(int k, int w, double value);

    const std::vector<double>& data() const { return f_; }

    bool operator==(const Policy& other) const = default;

private:
    std::size_t index(int k, int w) const { return static_cast<std::size_t>(k) * W_ + w; }

    int K_ = 0;
    int W_ = 0;
    std::vector<double> f_;
};

// Builds a policy from rows f[k][w], k = 0..K, and checks its invariants.
Policy make_policy(const std::vector<std::vector<double>>& rows);

// Checks that a policy fits the spec and every entry is a probability.
void check_policy(const ValidatedSpec& spec, const Policy& policy);

Policy always_transmit(const ValidatedSpec& spec);
Policy never_transmit(const ValidatedSpec& spec);

} // namespace dpsched
