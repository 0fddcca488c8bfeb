#pragma once

// Empirical-risk-minimization harness.  Training runs in machine precision:
// optimization never traverses the constructive coefficient cascade, so a
// 53-bit mirror of the tree net with hand-written backprop is used for
// speed.  Exact minimization over a 4-layer net is intractable; the trainer
// is multi-restart Adam with per-step projection onto the bounded parameter
// box, and results are labelled approximate ERM.

#include "radnet/activation.hpp"
#include "radnet/numeric.hpp"
#include "radnet/real.hpp"
#include "radnet/rng.hpp"
#include "radnet/tree_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <sstream>
#include <string>
#include <vector>

namespace radnet {

// -- double-precision activation -------------------------------------------

inline double act_value_d(ActKind k, double z) {
    switch (k) {
        case ActKind::logistic: return 1.0 / (1.0 + std::exp(-z));
        case ActKind::tanh_shifted: return 0.5 * (std::tanh(z) + 1.0);
        case ActKind::arctan_shifted: return std::atan(z) / 3.141592653589793 + 0.5;
        case ActKind::gompertz: return std::exp(-std::exp(-z));
        case ActKind::identity: return z;
    }
    return z;
}

inline double act_deriv_d(ActKind k, double z) {
    switch (k) {
        case ActKind::logistic: {
            double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
        case ActKind::tanh_shifted: {
            double c = std::cosh(z);
            return 0.5 / (c * c);
        }
        case ActKind::arctan_shifted: return 1.0 / (3.141592653589793 * (1.0 + z * z));
        case ActKind::gompertz: {
            double u = std::exp(-z);
            return std::exp(-u) * u;
        }
        case ActKind::identity: return 1.0;
    }
    return 1.0;
}

// -- flat 53-bit tree net ----------------------------------------------------

struct DoubleNet {
    TreeArch arch;
    std::vector<double> leaf_a, leaf_w, leaf_b;
    std::vector<std::vector<double>> node_a, node_b;

    explicit DoubleNet(TreeArch a) : arch(std::move(a)) {
        arch.validate();
        leaf_a.assign(arch.nodes_at(0), 0.0);
        leaf_w.assign(arch.nodes_at(0), 0.0);
        leaf_b.assign(arch.nodes_at(0), 0.0);
        node_a.resize(arch.L);
        node_b.resize(arch.L);
        for (int k = 1; k <= arch.L; ++k) {
            node_a[k - 1].assign(arch.nodes_at(k), 0.0);
            node_b[k - 1].assign(arch.nodes_at(k), 0.0);
        }
    }

    long parameter_count() const { return arch.param_count(); }

    double eval(const std::vector<double>& x) const {
        std::vector<double> cur(leaf_sums(x));
        for (int k = 1; k <= arch.L; ++k) layer_sums(k, cur);
        return cur[0];
    }

    TreeNet to_tree_net(unsigned prec = kMinPrecision) const {
        TreeNet net(arch, prec);
        for (size_t i = 0; i < leaf_a.size(); ++i)
            net.set_leaf(static_cast<long>(i), Real(leaf_a[i], prec), Real(leaf_w[i], prec),
                         Real(leaf_b[i], prec));
        for (int k = 1; k <= arch.L; ++k)
            for (size_t i = 0; i < node_a[k - 1].size(); ++i)
                net.set_node(k, static_cast<long>(i), Real(node_a[k - 1][i], prec),
                             Real(node_b[k - 1][i], prec));
        return net;
    }

  private:
    std::vector<double> leaf_sums(const std::vector<double>& x) const {
        const int N0 = arch.widths[0];
        const long paths = arch.nodes_at(0) / N0;
        std::vector<double> out(paths);
        for (long p = 0; p < paths; ++p) {
            double s = 0.0;
            for (int j = 0; j < N0; ++j) {
                long i = j + N0 * p;
                s += leaf_a[i] * act_value_d(arch.acts[0], leaf_w[i] * x[j] + leaf_b[i]);
            }
            out[p] = s;
        }
        return out;
    }

    void layer_sums(int k, std::vector<double>& cur) const {
        const int Nk = arch.widths[k];
        const long groups = arch.nodes_at(k) / Nk;
        std::vector<double> out(groups);
        for (long q = 0; q < groups; ++q) {
            double s = 0.0;
            for (int j = 0; j < Nk; ++j) {
                long i = j + Nk * q;
                s += node_a[k - 1][i] * act_value_d(arch.acts[k], cur[i] + node_b[k - 1][i]);
            }
            out[q] = s;
        }
        cur = std::move(out);
    }

  public:
    // Flat parameter access used by the optimizer: leaves first (a,w,b),
    // then per layer (a,b).
    long flat_size() const { return arch.param_count(); }

    double get_flat(long i) const { return *flat_ptr(i); }
    void set_flat(long i, double v) { *const_cast<double*>(flat_ptr(i)) = v; }

    const double* flat_ptr(long i) const {
        long nl = static_cast<long>(leaf_a.size());
        if (i < nl) return &leaf_a[i];
        i -= nl;
        if (i < nl) return &leaf_w[i];
        i -= nl;
        if (i < nl) return &leaf_b[i];
        i -= nl;
        for (int k = 1; k <= arch.L; ++k) {
            long mk = static_cast<long>(node_a[k - 1].size());
            if (i < mk) return &node_a[k - 1][i];
            i -= mk;
            if (i < mk) return &node_b[k - 1][i];
            i -= mk;
        }
        throw argument_error("flat index out of range");
    }

    // Mean-squared training loss and its gradient over the batch.
    double loss_and_grad(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                         DoubleNet& grad) const {
        const long m = static_cast<long>(xs.size());
        const int L = arch.L;
        double loss = 0.0;
        // per-sample forward caches
        std::vector<std::vector<double>> sums(L + 1);   // S_k group values
        std::vector<std::vector<double>> phis(L + 1);   // phi(z) per node
        std::vector<std::vector<double>> dphis(L + 1);  // phi'(z) per node
        for (long t = 0; t < m; ++t) {
            const std::vector<double>& x = xs[t];
            const int N0 = arch.widths[0];
            const long n_leaf = arch.nodes_at(0);
            phis[0].resize(n_leaf);
            dphis[0].resize(n_leaf);
            sums[0].resize(n_leaf / N0);
            for (long p = 0; p < n_leaf / N0; ++p) {
                double s = 0.0;
                for (int j = 0; j < N0; ++j) {
                    long i = j + N0 * p;
                    double z = leaf_w[i] * x[j] + leaf_b[i];
                    phis[0][i] = act_value_d(arch.acts[0], z);
                    dphis[0][i] = act_deriv_d(arch.acts[0], z);
                    s += leaf_a[i] * phis[0][i];
                }
                sums[0][p] = s;
            }
            for (int k = 1; k <= L; ++k) {
                const int Nk = arch.widths[k];
                const long nodes = arch.nodes_at(k);
                phis[k].resize(nodes);
                dphis[k].resize(nodes);
                sums[k].resize(nodes / Nk);
                for (long q = 0; q < nodes / Nk; ++q) {
                    double s = 0.0;
                    for (int j = 0; j < Nk; ++j) {
                        long i = j + Nk * q;
                        double z = sums[k - 1][i] + node_b[k - 1][i];
                        phis[k][i] = act_value_d(arch.acts[k], z);
                        dphis[k][i] = act_deriv_d(arch.acts[k], z);
                        s += node_a[k - 1][i] * phis[k][i];
                    }
                    sums[k][q] = s;
                }
            }
            const double resid = sums[L][0] - ys[t];
            loss += resid * resid;

            // backward: gsum[k][q] = dL/dS_k[q]
            std::vector<std::vector<double>> gsum(L + 1);
            gsum[L].assign(1, 2.0 * resid / m);
            for (int k = L; k >= 1; --k) {
                const int Nk = arch.widths[k];
                const long nodes = arch.nodes_at(k);
                gsum[k - 1].assign(nodes, 0.0);
                for (long q = 0; q < nodes / Nk; ++q) {
                    double g = gsum[k][q];
                    if (g == 0.0) continue;
                    for (int j = 0; j < Nk; ++j) {
                        long i = j + Nk * q;
                        grad.node_a[k - 1][i] += g * phis[k][i];
                        double gi = g * node_a[k - 1][i] * dphis[k][i];
                        grad.node_b[k - 1][i] += gi;
                        gsum[k - 1][i] = gi;
                    }
                }
            }
            for (long p = 0; p < arch.nodes_at(0) / N0; ++p) {
                double g = gsum[0][p];
                if (g == 0.0) continue;
                for (int j = 0; j < N0; ++j) {
                    long i = j + N0 * p;
                    grad.leaf_a[i] += g * phis[0][i];
                    double gi = g * leaf_a[i] * dphis[0][i];
                    grad.leaf_w[i] += gi * x[j];
                    grad.leaf_b[i] += gi;
                }
            }
        }
        return loss / m;
    }
};

// -- dataset -----------------------------------------------------------------

struct Sample {
    std::vector<double> x;
    double y;
};

enum class NoiseKind { none, bounded_uniform };

struct LearningConfig {
    long m = 256;
    int d = 2;
    double r = 1.0;
    int s = 0;
    double M = 2.0;           // response bound; y clipped to [-M, M]
    NoiseKind noise = NoiseKind::none;
    double sigma = 0.0;
    double target_sup = 1.0;  // sup-norm bound of the regression function
    double n_rule_C = 1.0;    // n = floor(C m^{1/(2r+1)})
    int restarts = 3;
    int steps = 400;
    double lr = 0.05;
    double init_scale = 0.7;
    double clip_R = 1.0;      // parameter box R (A_L)^alpha
    double clip_alpha = 48.0;
    ActKind act = ActKind::logistic;
    std::uint64_t seed = 1;

    int n_of_m(long m_val) const {
        int n = static_cast<int>(std::floor(n_rule_C * std::pow(static_cast<double>(m_val),
                                                                1.0 / (2.0 * r + 1.0))));
        return std::max(2, n);
    }

    TreeArch arch_for(int n) const {
        return TreeArch{3, {d, 6, s + 3, 3 * n + 3}, {act, act, act, act}, 0.0};
    }
};

using TargetFn = std::function<double(const std::vector<double>&)>;

inline std::vector<Sample> sample_dataset(const TargetFn& f_rho, const LearningConfig& cfg) {
    if (cfg.m < 1) throw argument_error("sample_dataset: m >= 1 required");
    if (cfg.noise == NoiseKind::bounded_uniform && cfg.target_sup + cfg.sigma > cfg.M)
        throw argument_error("sample_dataset: sigma too large; |y| can exceed M");
    Rng rng = Rng::derive(cfg.seed, 0xDA7A);
    std::vector<Sample> out;
    out.reserve(cfg.m);
    for (long i = 0; i < cfg.m; ++i) {
        Sample s;
        s.x = rng.ball_point(cfg.d);
        s.y = f_rho(s.x);
        if (cfg.noise == NoiseKind::bounded_uniform) s.y += rng.uniform(-cfg.sigma, cfg.sigma);
        s.y = std::clamp(s.y, -cfg.M, cfg.M);
        out.push_back(std::move(s));
    }
    return out;
}

// pi_M: projection of predictions onto [-M, M].
inline double truncate(double v, double M) {
    if (!(M > 0.0)) throw argument_error("truncate: M > 0 required");
    return std::copysign(std::min(std::abs(v), M), v);
}

// -- trainer -----------------------------------------------------------------

struct TrainResult {
    DoubleNet net;
    double train_loss = 0.0;
    int best_restart = -1;
    int diverged_restarts = 0;
};

inline DoubleNet random_net(const TreeArch& arch, double scale, Rng& rng) {
    DoubleNet net(arch);
    for (auto* v : {&net.leaf_a, &net.leaf_w, &net.leaf_b})
        for (double& p : *v) p = rng.uniform(-scale, scale);
    for (int k = 1; k <= arch.L; ++k) {
        for (double& p : net.node_a[k - 1]) p = rng.uniform(-scale, scale);
        for (double& p : net.node_b[k - 1]) p = rng.uniform(-scale, scale);
    }
    return net;
}

inline TrainResult train_erm(const TreeArch& arch, const std::vector<Sample>& data,
                             const LearningConfig& cfg) {
    if (data.empty()) throw argument_error("train_erm: empty dataset");
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    xs.reserve(data.size());
    for (const auto& s : data) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    const double box = cfg.clip_R *
                       std::exp(std::min(690.0, cfg.clip_alpha * std::log(static_cast<double>(
                                                    arch.param_count()))));

    TrainResult best{DoubleNet(arch)};
    bool have_best = false;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng = Rng::derive(cfg.seed, 0x7EA1 + restart);
        DoubleNet net = random_net(arch, cfg.init_scale, rng);
        DoubleNet grad(arch), m1(arch), m2(arch);
        const long P = net.flat_size();
        bool diverged = false;
        double loss = 0.0;
        for (int step = 0; step < cfg.steps; ++step) {
            DoubleNet g(arch);
            loss = net.loss_and_grad(xs, ys, g);
            if (!std::isfinite(loss)) {
                diverged = true;
                break;
            }
            const double lr_t = cfg.lr * (1.0 - 0.9 * step / std::max(1, cfg.steps - 1));
            const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
            const double bc1 = 1.0 - std::pow(b1, step + 1);
            const double bc2 = 1.0 - std::pow(b2, step + 1);
            for (long i = 0; i < P; ++i) {
                double gi = g.get_flat(i);
                double mi = b1 * m1.get_flat(i) + (1 - b1) * gi;
                double vi = b2 * m2.get_flat(i) + (1 - b2) * gi * gi;
                m1.set_flat(i, mi);
                m2.set_flat(i, vi);
                double upd = lr_t * (mi / bc1) / (std::sqrt(vi / bc2) + eps);
                double p = net.get_flat(i) - upd;
                net.set_flat(i, std::clamp(p, -box, box));
            }
        }
        if (diverged) {
            ++best.diverged_restarts;
            continue;
        }
        // final loss after the last update
        DoubleNet g(arch);
        loss = net.loss_and_grad(xs, ys, g);
        if (!std::isfinite(loss)) {
            ++best.diverged_restarts;
            continue;
        }
        if (!have_best || loss < best.train_loss) {
            best.net = std::move(net);
            best.train_loss = loss;
            best.best_restart = restart;
            have_best = true;
        }
    }
    if (!have_best)
        throw training_error("all " + std::to_string(cfg.restarts) +
                             " restarts diverged (non-finite loss)");
    return best;
}

// -- risk --------------------------------------------------------------------

struct RiskEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Monte-Carlo estimate of || pi_M net - f_rho ||^2 under the uniform ball law.
inline RiskEstimate excess_risk(const DoubleNet& net, const TargetFn& f_rho, double M, long n_test,
                                std::uint64_t seed) {
    if (n_test < 1) throw argument_error("excess_risk: n_test >= 1 required");
    Rng rng = Rng::derive(seed, 0x41D);
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n_test; ++i) {
        std::vector<double> x = rng.ball_point(net.arch.widths[0]);
        double diff = truncate(net.eval(x), M) - f_rho(x);
        double v = diff * diff;
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / n_test;
    double var = std::max(0.0, sum2 / n_test - mean * mean);
    return {mean, std::sqrt(var / n_test)};
}

// -- sweep -------------------------------------------------------------------

struct RateRow {
    long m = 0;
    int n = 0;
    int trials = 0;
    double median_excess_risk = 0.0;
    double stderr_ = 0.0;
};

struct RateTable {
    std::vector<RateRow> rows;
    double fitted_slope = 0.0;

    std::string to_csv() const {
        std::ostringstream os;
        os << "m,n,trials,median_excess_risk,stderr,fitted_slope\n";
        for (const auto& r : rows)
            os << r.m << "," << r.n << "," << r.trials << "," << r.median_excess_risk << ","
               << r.stderr_ << "," << fitted_slope << "\n";
        return os.str();
    }
};

inline RateTable rate_sweep(const TargetFn& f_rho, const std::vector<long>& m_list, int trials,
                            const LearningConfig& cfg) {
    if (m_list.empty()) throw argument_error("rate_sweep: m_list must be nonempty");
    for (size_t i = 1; i < m_list.size(); ++i)
        if (m_list[i] <= m_list[i - 1]) throw argument_error("rate_sweep: m_list must increase");
    if (trials < 3) throw argument_error("rate_sweep: trials >= 3 required");

    RateTable table;
    for (long m : m_list) {
        const int n = cfg.n_of_m(m);
        const TreeArch arch = cfg.arch_for(n);
        std::vector<std::future<double>> futs;
        for (int trial = 0; trial < trials; ++trial) {
            futs.push_back(std::async(std::launch::async, [&, m, trial]() {
                LearningConfig tc = cfg;
                tc.m = m;
                tc.seed = Rng::derive(cfg.seed, 0x5EED + trial).next();
                std::vector<Sample> data = sample_dataset(f_rho, tc);
                TrainResult res = train_erm(arch, data, tc);
                return excess_risk(res.net, f_rho, tc.M, 4096, tc.seed).value;
            }));
        }
        std::vector<double> risks;
        for (auto& f : futs) risks.push_back(f.get());
        std::vector<double> sorted = risks;
        std::sort(sorted.begin(), sorted.end());
        double median = trials % 2 ? sorted[trials / 2]
                                   : 0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2]);
        double mean = 0.0;
        for (double v : risks) mean += v;
        mean /= trials;
        double var = 0.0;
        for (double v : risks) var += (v - mean) * (v - mean);
        var = trials > 1 ? var / (trials - 1) : 0.0;
        table.rows.push_back({m, n, trials, median, std::sqrt(var / trials)});
    }
    std::vector<double> lm, le;
    for (const auto& r : table.rows)
        if (r.median_excess_risk > 0) {
            lm.push_back(std::log(static_cast<double>(r.m)));
            le.push_back(std::log(r.median_excess_risk));
        }
    table.fitted_slope = lm.size() >= 2 ? fit_slope(lm, le) : 0.0;
    return table;
}

}  // namespace radnet
