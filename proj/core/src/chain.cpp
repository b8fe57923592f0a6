#include "dpsched/chain.hpp"

#include "dpsched/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>

namespace dpsched {

namespace {

// f beyond K is 0, matching the closed form.
double f_or_zero(const Policy& p, int k, int w)
{
    return k > p.K() ? 0.0 : p(k, w);
}

double send_prob(const ValidatedSpec& spec, const Policy& policy, int t)
{
    if (t == 0)
        return 0.0;
    double s = 0.0;
    for (int w = 0; w < spec.W(); ++w)
        s += spec.eta(w) * policy(t, w);
    return s;
}

} // namespace

double forward_prob(const ValidatedSpec& spec, const Policy& policy, int k, int m)
{
    double stay = 0.0;
    double send = 0.0;
    for (int w = 0; w < spec.W(); ++w) {
        stay += spec.eta(w) * (1.0 - f_or_zero(policy, k + m, w));
        send += spec.eta(w) * f_or_zero(policy, k + m + 1, w);
    }
    return spec.theta(m) * stay + spec.theta(m + 1) * send;
}

double backward_prob(const ValidatedSpec& spec, const Policy& policy, int k)
{
    double send = 0.0;
    for (int w = 0; w < spec.W(); ++w)
        send += spec.eta(w) * policy(k, w);
    return spec.theta(0) * send;
}

TransitionMatrix build_chain(const ValidatedSpec& spec, const Policy& policy)
{
    check_policy(spec, policy);
    const int K = spec.K();
    TransitionMatrix tau(K + 1);
    Matrix& lam = tau.lam_;

    std::vector<double> F(K + 1);
    for (int t = 0; t <= K; ++t)
        F[t] = send_prob(spec, policy, t);

    for (int k = 0; k <= K; ++k) {
        for (int m = 0; m <= spec.M(); ++m) {
            int t = std::min(k + m, K);
            lam(t, k) += spec.theta(m) * (1.0 - F[t]);
            if (t > 0)
                lam(t - 1, k) += spec.theta(m) * F[t];
        }
        // Diagonal by normalisation, checked against the accumulated value.
        double off = 0.0;
        for (int l = 0; l <= K; ++l)
            if (l != k)
                off += lam(l, k);
        double diag = 1.0 - off;
        if (diag < 0.0) {
            if (diag < -1e-12)
                throw Error(Errc::NumericalInconsistency,
                            fmt::format("state {}: outgoing probability {} exceeds 1", k, off));
            diag = 0.0;
        }
        if (std::abs(diag - lam(k, k)) > 1e-9)
            throw Error(Errc::NumericalInconsistency,
                        fmt::format("state {}: column sum off by {}", k, diag - lam(k, k)));
        lam(k, k) = diag;
    }
    return tau;
}

std::vector<std::vector<int>> closed_classes(const TransitionMatrix& tau)
{
    const int n = tau.states();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (int s = 0; s < n; ++s) {
        std::deque<int> todo{s};
        reach[s][s] = 1;
        while (!todo.empty()) {
            int u = todo.front();
            todo.pop_front();
            for (int v = std::max(0, u - 1); v < n; ++v)
                if (!reach[s][v] && tau(u, v) > 0.0) {
                    reach[s][v] = 1;
                    todo.push_back(v);
                }
        }
    }
    std::vector<std::vector<int>> classes;
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
        if (seen[s])
            continue;
        std::vector<int> cls;
        bool closed = true;
        for (int v = 0; v < n; ++v) {
            if (reach[s][v] && reach[v][s]) {
                cls.push_back(v);
                seen[v] = 1;
            }
            else if (reach[s][v]) {
                closed = false;
            }
        }
        if (closed)
            classes.push_back(std::move(cls));
    }
    return classes;
}

StationaryDist stationary(const TransitionMatrix& tau)
{
    const int n = tau.states();
    auto classes = closed_classes(tau);
    if (classes.size() != 1) {
        std::string desc;
        for (const auto& c : classes)
            desc += fmt::format(" {{{}}}", fmt::join(c, ","));
        throw SingularSystemError(
            fmt::format("chain has {} closed classes:{}", classes.size(), desc), classes);
    }

    // Grassmann-Taksar-Heyman elimination on the closed class: no
    // subtractions, so nearly decomposable chains (a full buffer left once
    // in millions of slots) keep full relative accuracy.  Transient states
    // get zero mass.
    const auto& cls = classes.front();
    const int m = static_cast<int>(cls.size());
    Matrix p(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            p(i, j) = tau(cls[i], cls[j]);
    for (int k = m - 1; k > 0; --k) {
        double out = 0.0;
        for (int j = 0; j < k; ++j)
            out += p(k, j);
        if (!(out > 0.0))
            throw SingularSystemError("stationary system is singular", classes);
        for (int i = 0; i < k; ++i)
            p(i, k) /= out;
        for (int i = 0; i < k; ++i) {
            double f = p(i, k);
            if (f == 0.0)
                continue;
            for (int j = 0; j < k; ++j)
                p(i, j) += f * p(k, j);
        }
    }
    std::vector<double> x(m, 0.0);
    x[0] = 1.0;
    double total = 1.0;
    for (int k = 1; k < m; ++k) {
        for (int i = 0; i < k; ++i)
            x[k] += x[i] * p(i, k);
        total += x[k];
    }
    StationaryDist out{std::vector<double>(n, 0.0)};
    for (int i = 0; i < m; ++i)
        out.pi[cls[i]] = x[i] / total;

    for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            s += tau.lambda()(l, k) * out.pi[k];
        if (std::abs(s - out.pi[l]) > 1e-10)
            throw Error(Errc::NumericalInconsistency,
                        fmt::format("balance residual {} at state {}", s - out.pi[l], l));
    }
    return out;
}

Metrics metrics(const ValidatedSpec& spec, const Policy& policy, const StationaryDist& pi)
{
    check_policy(spec, policy);
    const int K = spec.K();
    std::vector<double> cost(K + 1, 0.0); // expected power if t = k
    for (int t = 1; t <= K; ++t)
        for (int w = 0; w < spec.W(); ++w)
            cost[t] += spec.eta(w) * spec.power(w) * policy(t, w);

    Metrics out;
    for (int k = 0; k <= K; ++k) {
        out.avg_queue += k * pi.pi[k];
        for (int m = 0; m <= spec.M(); ++m) {
            out.power += pi.pi[k] * spec.theta(m) * cost[std::min(k + m, K)];
            out.overflow += pi.pi[k] * spec.theta(m) * std::max(k + m - K, 0);
        }
    }
    out.delay = out.avg_queue / spec.mean_arrival();
    return out;
}

std::vector<double> decision_state_probs(const ValidatedSpec& spec, const std::vector<double>& pi)
{
    const int K = spec.K();
    std::vector<double> out(K + 1, 0.0);
    for (int j = 0; j <= K; ++j)
        for (int i = 0; i <= j; ++i)
            out[j] += pi[i] * (j < K ? spec.theta(j - i) : spec.arrival_tail(K - i));
    return out;
}

ChainAnalysis analyze(const ValidatedSpec& spec, const Policy& policy)
{
    ChainAnalysis out;
    out.pi = stationary(build_chain(spec, policy));
    out.metrics = metrics(spec, policy, out.pi);
    return out;
}

} // namespace dpsched
