#pragma once

// Layered tree-structured networks.  A depth-L tree has widths N_0..N_L and
// one activation per layer; every node owns its own parameters (no sharing
// across sibling subtrees).  Nodes at layer k >= 1 carry (a, b): output
// coefficient and input bias.  Leaf nodes carry (a, w, b) and read one input
// coordinate.  The free-parameter count is
//
//     A_L = 2 * sum_{k=0..L} prod_{i=k..L} N_i  +  prod_{i=0..L} N_i.
//
// Evaluation is the recursive sum
//     S_0[path]  = sum_j a_j phi_0(w_j x^(j) + b_j)
//     S_k[path]  = sum_j a_j phi_k(S_{k-1}[j, path] + b_j)
// and the net's value is S_L.  Identical sibling subtrees are deduplicated
// at evaluation time; the cached evaluation is bit-identical to the naive
// one because equal parameters and inputs round identically.

#include "radnet/activation.hpp"
#include "radnet/real.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace radnet {

struct TreeArch {
    int L = 1;
    std::vector<int> widths;     // N_0 .. N_L
    std::vector<ActKind> acts;   // phi_0 .. phi_L
    double theta0 = 0.0;

    void validate() const {
        if (L < 1) throw argument_error("TreeArch: L >= 1 required");
        if (static_cast<int>(widths.size()) != L + 1)
            throw argument_error("TreeArch: widths must list N_0..N_L");
        if (static_cast<int>(acts.size()) != L + 1)
            throw argument_error("TreeArch: one activation per layer required");
        for (int w : widths)
            if (w < 1) throw argument_error("TreeArch: widths must be >= 1");
    }

    int input_dim() const { return widths[0]; }

    // Number of nodes at layer k: prod_{i=k..L} N_i.
    long nodes_at(int k) const {
        long m = 1;
        for (int i = k; i <= L; ++i) m *= widths[i];
        return m;
    }

    long param_count() const {
        long total = nodes_at(0);  // leaf weights w
        for (int k = 0; k <= L; ++k) total += 2 * nodes_at(k);
        return total;
    }
};

inline long param_count(const TreeArch& arch) {
    arch.validate();
    return arch.param_count();
}

struct BoundedClassSpec {
    Real alpha;
    Real R;

    BoundedClassSpec(const Real& a, const Real& r) : alpha(a), R(r) {
        if (alpha < 1.0 || R < 1.0) throw argument_error("BoundedClassSpec: alpha, R >= 1 required");
    }
};

struct BoundCheck {
    bool ok = true;
    Real bound;
    Real worst_abs;
    std::string worst_where;
};

class TreeNet {
  public:
    TreeNet(TreeArch arch, unsigned prec) : arch_(std::move(arch)), prec_(prec) {
        arch_.validate();
        leaf_a_.assign(arch_.nodes_at(0), Real(prec_));
        leaf_w_.assign(arch_.nodes_at(0), Real(prec_));
        leaf_b_.assign(arch_.nodes_at(0), Real(prec_));
        node_a_.resize(arch_.L);
        node_b_.resize(arch_.L);
        for (int k = 1; k <= arch_.L; ++k) {
            node_a_[k - 1].assign(arch_.nodes_at(k), Real(prec_));
            node_b_[k - 1].assign(arch_.nodes_at(k), Real(prec_));
        }
    }

    const TreeArch& arch() const { return arch_; }
    unsigned precision_bits() const { return prec_; }

    // Leaf node (j, path): j-th child (input coordinate j) under the flat
    // path index over layers 1..L.
    long leaf_index(int j, long path) const { return j + arch_.widths[0] * path; }
    long node_index(int k, int j, long path) const { return j + arch_.widths[k] * path; }

    void set_leaf(long idx, const Real& a, const Real& w, const Real& b) {
        leaf_a_[idx] = at_prec(a);
        leaf_w_[idx] = at_prec(w);
        leaf_b_[idx] = at_prec(b);
        dirty_ = true;
    }
    void set_node(int k, long idx, const Real& a, const Real& b) {
        node_a_[k - 1][idx] = at_prec(a);
        node_b_[k - 1][idx] = at_prec(b);
        dirty_ = true;
    }

    const Real& leaf_a(long i) const { return leaf_a_[i]; }
    const Real& leaf_w(long i) const { return leaf_w_[i]; }
    const Real& leaf_b(long i) const { return leaf_b_[i]; }
    const Real& node_a(int k, long i) const { return node_a_[k - 1][i]; }
    const Real& node_b(int k, long i) const { return node_b_[k - 1][i]; }

    // Exact count of stored scalars; must equal arch().param_count().
    long structural_param_count() const {
        long n = static_cast<long>(leaf_a_.size() + leaf_w_.size() + leaf_b_.size());
        for (int k = 1; k <= arch_.L; ++k)
            n += static_cast<long>(node_a_[k - 1].size() + node_b_[k - 1].size());
        return n;
    }

    Real max_abs_param() const {
        Real m(prec_);
        for (const Real& v : leaf_a_) m = max(m, abs(v));
        for (const Real& v : leaf_w_) m = max(m, abs(v));
        for (const Real& v : leaf_b_) m = max(m, abs(v));
        for (int k = 1; k <= arch_.L; ++k) {
            for (const Real& v : node_a_[k - 1]) m = max(m, abs(v));
            for (const Real& v : node_b_[k - 1]) m = max(m, abs(v));
        }
        return m;
    }

    Real eval(const std::vector<Real>& x) const {
        if (static_cast<int>(x.size()) != arch_.input_dim())
            throw argument_error("eval: input dimension " + std::to_string(x.size()) +
                                 " does not match N_0 = " + std::to_string(arch_.input_dim()));
        if (dirty_) rebuild_classes();
        return eval_dedup(x);
    }

    // Reference evaluation without subtree deduplication (for audits).
    Real eval_naive(const std::vector<Real>& x) const {
        if (static_cast<int>(x.size()) != arch_.input_dim())
            throw argument_error("eval: input dimension mismatch");
        const int N0 = arch_.widths[0];
        Activation phi0{arch_.acts[0]};
        std::vector<Real> cur;
        cur.reserve(arch_.nodes_at(1));
        const long paths0 = arch_.nodes_at(0) / N0;
        for (long p = 0; p < paths0; ++p) {
            Real s(prec_);
            for (int j = 0; j < N0; ++j) {
                long i = leaf_index(j, p);
                s += leaf_a_[i] * phi0.value(leaf_w_[i] * x[j] + leaf_b_[i]);
            }
            cur.push_back(std::move(s));
        }
        for (int k = 1; k <= arch_.L; ++k) {
            Activation phik{arch_.acts[k]};
            const int Nk = arch_.widths[k];
            const long groups = arch_.nodes_at(k) / Nk;
            std::vector<Real> next;
            next.reserve(groups);
            for (long q = 0; q < groups; ++q) {
                Real s(prec_);
                for (int j = 0; j < Nk; ++j) {
                    long i = node_index(k, j, q);
                    s += node_a_[k - 1][i] * phik.value(cur[i] + node_b_[k - 1][i]);
                }
                next.push_back(std::move(s));
            }
            cur = std::move(next);
        }
        return cur[0];
    }

    BoundCheck check_bounds(const BoundedClassSpec& spec) const {
        BoundCheck res{true, Real(prec_), Real(prec_), ""};
        Real al(spec.alpha.to_double(), prec_), r(spec.R.to_double(), prec_);
        res.bound = r * pow(Real(arch_.param_count(), prec_), al);
        auto consider = [&](const Real& v, const std::string& where) {
            Real a = abs(v);
            if (a > res.worst_abs) {
                res.worst_abs = a;
                res.worst_where = where;
            }
            if (a > res.bound) res.ok = false;
        };
        for (size_t i = 0; i < leaf_a_.size(); ++i) {
            consider(leaf_a_[i], "leaf a[" + std::to_string(i) + "]");
            consider(leaf_w_[i], "leaf w[" + std::to_string(i) + "]");
            consider(leaf_b_[i], "leaf b[" + std::to_string(i) + "]");
        }
        for (int k = 1; k <= arch_.L; ++k)
            for (size_t i = 0; i < node_a_[k - 1].size(); ++i) {
                consider(node_a_[k - 1][i], "layer " + std::to_string(k) + " a[" + std::to_string(i) + "]");
                consider(node_b_[k - 1][i], "layer " + std::to_string(k) + " b[" + std::to_string(i) + "]");
            }
        return res;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["format_version"] = 1;
        nlohmann::ordered_json arch;
        arch["L"] = arch_.L;
        arch["widths"] = arch_.widths;
        std::vector<std::string> names;
        for (ActKind k : arch_.acts) names.push_back(act_kind_name(k));
        arch["activations"] = names;
        arch["theta0"] = arch_.theta0;
        doc["arch"] = arch;
        doc["precision_bits"] = prec_;
        auto dump = [](const std::vector<Real>& v) {
            std::vector<std::string> out;
            out.reserve(v.size());
            for (const Real& r : v) out.push_back(r.to_string());
            return out;
        };
        nlohmann::ordered_json leaf;
        leaf["a"] = dump(leaf_a_);
        leaf["w"] = dump(leaf_w_);
        leaf["b"] = dump(leaf_b_);
        doc["leaf_params"] = leaf;
        nlohmann::ordered_json layers = nlohmann::ordered_json::array();
        for (int k = 1; k <= arch_.L; ++k) {
            nlohmann::ordered_json layer;
            layer["a"] = dump(node_a_[k - 1]);
            layer["b"] = dump(node_b_[k - 1]);
            layers.push_back(layer);
        }
        doc["node_params"] = layers;
        if (!metadata.is_null()) doc["metadata"] = metadata;
        return doc;
    }

    static TreeNet from_json(const nlohmann::json& doc) {
        auto need = [&](const nlohmann::json& obj, const char* field) -> const nlohmann::json& {
            if (!obj.contains(field))
                throw parse_error(std::string("net document: missing field '") + field + "'");
            return obj.at(field);
        };
        if (!doc.contains("precision_bits"))
            throw parse_error("net document lacks precision_bits; documents without an explicit "
                              "precision are rejected");
        unsigned prec = doc.at("precision_bits").get<unsigned>();
        const nlohmann::json& arch_doc = need(doc, "arch");
        TreeArch arch;
        arch.L = need(arch_doc, "L").get<int>();
        arch.widths = need(arch_doc, "widths").get<std::vector<int>>();
        for (const auto& name : need(arch_doc, "activations"))
            arch.acts.push_back(act_kind_from_name(name.get<std::string>()));
        arch.theta0 = need(arch_doc, "theta0").get<double>();
        arch.validate();
        TreeNet net(arch, prec);
        auto load = [&](const nlohmann::json& arr, std::vector<Real>& dst, const std::string& where) {
            if (!arr.is_array() || arr.size() != dst.size())
                throw parse_error("net document: " + where + " must hold " + std::to_string(dst.size()) +
                                  " entries");
            for (size_t i = 0; i < dst.size(); ++i)
                dst[i] = Real::from_string(arr.at(i).get<std::string>(), prec);
        };
        const nlohmann::json& leaf = need(doc, "leaf_params");
        load(need(leaf, "a"), net.leaf_a_, "leaf_params.a");
        load(need(leaf, "w"), net.leaf_w_, "leaf_params.w");
        load(need(leaf, "b"), net.leaf_b_, "leaf_params.b");
        const nlohmann::json& layers = need(doc, "node_params");
        if (!layers.is_array() || static_cast<int>(layers.size()) != arch.L)
            throw parse_error("net document: node_params must hold " + std::to_string(arch.L) +
                              " layers, found " + std::to_string(layers.size()));
        for (int k = 1; k <= arch.L; ++k) {
            load(need(layers.at(k - 1), "a"), net.node_a_[k - 1],
                 "node_params[" + std::to_string(k - 1) + "].a");
            load(need(layers.at(k - 1), "b"), net.node_b_[k - 1],
                 "node_params[" + std::to_string(k - 1) + "].b");
        }
        if (doc.contains("metadata")) net.metadata = doc.at("metadata");
        net.dirty_ = true;
        return net;
    }

    bool params_equal(const TreeNet& o) const {
        if (arch_.widths != o.arch_.widths || prec_ != o.prec_) return false;
        auto eq = [](const std::vector<Real>& a, const std::vector<Real>& b) {
            for (size_t i = 0; i < a.size(); ++i) {
                if (a[i].is_zero() && b[i].is_zero()) continue;
                if (a[i] != b[i]) return false;
            }
            return true;
        };
        if (!eq(leaf_a_, o.leaf_a_) || !eq(leaf_w_, o.leaf_w_) || !eq(leaf_b_, o.leaf_b_)) return false;
        for (int k = 1; k <= arch_.L; ++k)
            if (!eq(node_a_[k - 1], o.node_a_[k - 1]) || !eq(node_b_[k - 1], o.node_b_[k - 1]))
                return false;
        return true;
    }

    nlohmann::json metadata;

  private:
    Real at_prec(const Real& v) const {
        if (v.precision_bits() != prec_)
            throw precision_mismatch_error("TreeNet: parameter precision does not match net context");
        return v;
    }

    // Exact per-Real key: sign, exponent, limbs.  Two distinct values can
    // never collide, so deduplication is sound.
    static void key_push(std::vector<std::uint64_t>& key, const Real& v) {
        if (v.is_zero() || !v.is_finite()) {
            key.push_back(v.is_zero() ? 1 : 2);
            key.push_back(0);
            return;
        }
        key.push_back(static_cast<std::uint64_t>(v.sign() + 3) << 32);
        key.push_back(static_cast<std::uint64_t>(mpfr_get_exp(v.raw())));
        const mp_limb_t* limbs = v.raw()->_mpfr_d;
        const long nl = (mpfr_get_prec(v.raw()) + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;
        for (long i = 0; i < nl; ++i) key.push_back(limbs[i]);
    }

    void rebuild_classes() const {
        class_of_.assign(arch_.L + 1, {});
        class_rep_.assign(arch_.L + 1, {});
        const int N0 = arch_.widths[0];
        const long paths0 = arch_.nodes_at(0) / N0;
        {
            std::map<std::vector<std::uint64_t>, int> seen;
            class_of_[0].resize(paths0);
            for (long p = 0; p < paths0; ++p) {
                std::vector<std::uint64_t> key;
                for (int j = 0; j < N0; ++j) {
                    long i = leaf_index(j, p);
                    key_push(key, leaf_a_[i]);
                    key_push(key, leaf_w_[i]);
                    key_push(key, leaf_b_[i]);
                }
                auto [it, inserted] = seen.emplace(std::move(key), static_cast<int>(class_rep_[0].size()));
                if (inserted) class_rep_[0].push_back(p);
                class_of_[0][p] = it->second;
            }
        }
        for (int k = 1; k <= arch_.L; ++k) {
            const int Nk = arch_.widths[k];
            const long groups = arch_.nodes_at(k) / Nk;
            std::map<std::vector<std::uint64_t>, int> seen;
            class_of_[k].resize(groups);
            for (long q = 0; q < groups; ++q) {
                std::vector<std::uint64_t> key;
                for (int j = 0; j < Nk; ++j) {
                    long i = node_index(k, j, q);
                    key.push_back(static_cast<std::uint64_t>(class_of_[k - 1][i]));
                    key_push(key, node_a_[k - 1][i]);
                    key_push(key, node_b_[k - 1][i]);
                }
                auto [it, inserted] = seen.emplace(std::move(key), static_cast<int>(class_rep_[k].size()));
                if (inserted) class_rep_[k].push_back(q);
                class_of_[k][q] = it->second;
            }
        }
        dirty_ = false;
    }

    Real eval_dedup(const std::vector<Real>& x) const {
        const int N0 = arch_.widths[0];
        Activation phi0{arch_.acts[0]};
        std::vector<Real> cur(class_rep_[0].size(), Real(prec_));
        for (size_t c = 0; c < class_rep_[0].size(); ++c) {
            long p = class_rep_[0][c];
            Real s(prec_);
            for (int j = 0; j < N0; ++j) {
                long i = leaf_index(j, p);
                s += leaf_a_[i] * phi0.value(leaf_w_[i] * x[j] + leaf_b_[i]);
            }
            cur[c] = std::move(s);
        }
        for (int k = 1; k <= arch_.L; ++k) {
            Activation phik{arch_.acts[k]};
            const int Nk = arch_.widths[k];
            std::vector<Real> next(class_rep_[k].size(), Real(prec_));
            for (size_t c = 0; c < class_rep_[k].size(); ++c) {
                long q = class_rep_[k][c];
                Real s(prec_);
                for (int j = 0; j < Nk; ++j) {
                    long i = node_index(k, j, q);
                    s += node_a_[k - 1][i] * phik.value(cur[class_of_[k - 1][i]] + node_b_[k - 1][i]);
                }
                next[c] = std::move(s);
            }
            cur = std::move(next);
        }
        return cur[0];
    }

    TreeArch arch_;
    unsigned prec_;
    std::vector<Real> leaf_a_, leaf_w_, leaf_b_;
    std::vector<std::vector<Real>> node_a_, node_b_;

    mutable bool dirty_ = true;
    mutable std::vector<std::vector<int>> class_of_;
    mutable std::vector<std::vector<long>> class_rep_;
};

// log2 of the covering-number bound for the bounded tree class:
// 2 A_L log2( 2^{L+5/2} c1^{L+3/2} (R A_L^alpha)^{L+1} / eps ).
inline Real covering_bound_log2(const TreeArch& arch, const BoundedClassSpec& spec, const Real& c1,
                                const Real& eps) {
    if (!(eps > 0.0) || eps > 1.0) throw argument_error("covering_bound_log2: eps in (0,1] required");
    if (!(c1 > 0.0)) throw argument_error("covering_bound_log2: c1 > 0 required");
    const unsigned prec = eps.precision_bits();
    arch.validate();
    Real AL(arch.param_count(), prec);
    Real L(static_cast<long>(arch.L), prec);
    Real alpha(spec.alpha.to_double(), prec), R(spec.R.to_double(), prec);
    Real inner = (L + 2.5) + (L + 1.5) * log2(Real(c1.to_double(), prec)) +
                 (L + 1.0) * (log2(R) + alpha * log2(AL)) - log2(eps);
    return 2.0 * AL * inner;
}

}  // namespace radnet
