// Batch experiment runner: builds constructive nets, runs approximation- and
// learning-rate sweeps, generates packing families, and audits saved nets.
//
// Exit codes: 0 success, 2 config error, 3 numeric/precision error,
// 4 training failure.

#include "radnet/hard_instances.hpp"
#include "radnet/learning.hpp"
#include "radnet/radial.hpp"
#include "radnet/targets.hpp"
#include "radnet/tree_net.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    long seed = -1;
    long precision_bits = -1;
    std::string activation;
    std::vector<std::string> overrides;
};

json load_config(const CommonFlags& flags) {
    json cfg = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw radnet::argument_error("cannot open config file " + flags.config_path);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw radnet::parse_error("config parse error: " + std::string(e.what()));
        }
    }
    for (const std::string& ov : flags.overrides) {
        auto pos = ov.find('=');
        if (pos == std::string::npos)
            throw radnet::argument_error("--override expects KEY=VALUE, got '" + ov + "'");
        std::string key = ov.substr(0, pos), value = ov.substr(pos + 1);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value;  // plain string
        }
        json* node = &cfg;
        size_t start = 0;
        while (true) {
            size_t dot = key.find('.', start);
            std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
            if (dot == std::string::npos) {
                (*node)[part] = parsed;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
    // flags win over config
    if (flags.seed >= 0) cfg["seed"] = flags.seed;
    if (flags.precision_bits > 0) cfg["precision_bits"] = flags.precision_bits;
    if (!flags.activation.empty()) cfg["activation"] = flags.activation;
    return cfg;
}

template <typename T>
T field_or(const json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw radnet::argument_error("config field '" + key + "': " + e.what());
    }
}

template <typename T>
T required_field(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw radnet::argument_error("config is missing required field '" + key + "'");
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw radnet::argument_error("config field '" + key + "': " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw radnet::evaluation_error("cannot write " + path.string());
    out << content;
}

radnet::Activation activation_from(const json& cfg, unsigned prec) {
    std::string name = field_or<std::string>(cfg, "activation", "logistic");
    if (name == "identity") throw radnet::argument_error("identity is not a usable top-level activation");
    return radnet::make_activation(name, field_or<int>(cfg, "max_derivative_order", 10), prec);
}

radnet::RadialTarget radial_target_from(const json& cfg, int d) {
    const json& t = cfg.contains("target") ? cfg.at("target") : json{{"kind", "identity"}};
    std::string kind = field_or<std::string>(t, "kind", "identity");
    double r = field_or<double>(t, "r", 1.0);
    double value = field_or<double>(t, "value", 0.0);
    return radnet::named_radial_target(kind, r, d, value);
}

int cmd_build(const CommonFlags& flags) {
    json cfg = load_config(flags);
    unsigned prec = field_or<unsigned>(cfg, "precision_bits", radnet::kDefaultPrecision);
    int d = field_or<int>(cfg, "d", 2);
    int n = required_field<int>(cfg, "n");
    radnet::Activation act = activation_from(cfg, prec);
    radnet::RadialTarget target = radial_target_from(cfg, d);

    radnet::RadialBuildOptions opt;
    opt.precision_bits = prec;
    opt.precision_ceiling = field_or<unsigned>(cfg, "precision_ceiling", 4096);
    opt.measure_radial = field_or<int>(cfg, "measure_radial", 48);
    opt.measure_sphere = field_or<int>(cfg, "measure_sphere", 12);
    opt.measure_seed = field_or<std::uint64_t>(cfg, "seed", 0);
    if (cfg.contains("A_override")) opt.A_override = cfg.at("A_override").get<double>();

    radnet::RadialBuild rb = radnet::build_radial_net(target, n, act, opt);

    ordered_json report;
    report["config"] = cfg;
    report["activation"] = act.name();
    report["theta0"] = act.theta0;
    report["widths"] = rb.net.arch().widths;
    report["report"] = rb.report.to_json();
    write_file(fs::path(flags.out_dir) / "net.json", rb.net.to_json().dump(1));
    write_file(fs::path(flags.out_dir) / "report.json", report.dump(1));
    std::cout << report.dump(1) << "\n";
    return 0;
}

int cmd_rate_approx(const CommonFlags& flags) {
    json cfg = load_config(flags);
    unsigned prec = field_or<unsigned>(cfg, "precision_bits", radnet::kDefaultPrecision);
    int d = field_or<int>(cfg, "d", 2);
    std::vector<int> n_list = required_field<std::vector<int>>(cfg, "n_list");
    if (n_list.empty()) throw radnet::argument_error("n_list must be nonempty");
    radnet::Activation act = activation_from(cfg, prec);
    radnet::RadialTarget target = radial_target_from(cfg, d);
    double r = target.r();

    std::ostringstream csv;
    csv << "n,d,r,sup_error,params\n";
    std::vector<double> ln, le;
    for (int n : n_list) {
        radnet::RadialBuildOptions opt;
        opt.precision_bits = prec;
        opt.measure_seed = field_or<std::uint64_t>(cfg, "seed", 0);
        opt.measure_radial = field_or<int>(cfg, "measure_radial", 48);
        opt.measure_sphere = field_or<int>(cfg, "measure_sphere", 12);
        radnet::RadialBuild rb = radnet::build_radial_net(target, n, act, opt);
        csv << n << "," << d << "," << r << "," << rb.report.measured_sup_error << ","
            << rb.report.param_count << "\n";
        if (rb.report.measured_sup_error > 0) {
            ln.push_back(std::log(static_cast<double>(n)));
            le.push_back(std::log(rb.report.measured_sup_error));
        }
        std::cout << "n=" << n << " sup_error=" << rb.report.measured_sup_error
                  << " params=" << rb.report.param_count << "\n";
    }
    double slope = ln.size() >= 2 ? radnet::fit_slope(ln, le) : 0.0;
    csv << "fitted_slope," << slope << ",,,\n";
    write_file(fs::path(flags.out_dir) / "rate_approx.csv", csv.str());
    ordered_json echo;
    echo["config"] = cfg;
    echo["fitted_slope"] = slope;
    write_file(fs::path(flags.out_dir) / "rate_approx_config.json", echo.dump(1));
    std::cout << "fitted_slope=" << slope << "\n";
    return 0;
}

int cmd_rate_learn(const CommonFlags& flags) {
    json cfg = load_config(flags);
    radnet::LearningConfig lc;
    lc.d = field_or<int>(cfg, "d", 2);
    lc.r = field_or<double>(cfg, "r", 1.0);
    lc.s = static_cast<int>(std::ceil(lc.r)) - 1;
    lc.M = field_or<double>(cfg, "M", 2.0);
    lc.seed = field_or<std::uint64_t>(cfg, "seed", 1);
    lc.n_rule_C = field_or<double>(cfg, "n_rule_C", 1.0);
    if (cfg.contains("train")) {
        const json& t = cfg.at("train");
        lc.steps = field_or<int>(t, "steps", lc.steps);
        lc.restarts = field_or<int>(t, "restarts", lc.restarts);
        lc.lr = field_or<double>(t, "lr", lc.lr);
        lc.init_scale = field_or<double>(t, "init_scale", lc.init_scale);
    }
    if (cfg.contains("noise")) {
        const json& nz = cfg.at("noise");
        std::string kind = field_or<std::string>(nz, "kind", "none");
        if (kind == "bounded-uniform") {
            lc.noise = radnet::NoiseKind::bounded_uniform;
            lc.sigma = required_field<double>(nz, "sigma");
        } else if (kind != "none") {
            throw radnet::argument_error("noise.kind must be 'none' or 'bounded-uniform'");
        }
    }
    std::vector<long> m_list = field_or<std::vector<long>>(cfg, "m_list",
                                                           {256, 512, 1024, 2048, 4096, 8192});
    int trials = field_or<int>(cfg, "trials", 5);

    radnet::TargetFn f;
    const json& t = cfg.contains("target") ? cfg.at("target") : json{{"kind", "random-net"}};
    std::string kind = field_or<std::string>(t, "kind", "random-net");
    std::shared_ptr<radnet::DoubleNet> held;
    if (kind == "random-net") {
        int nt = field_or<int>(t, "n", 3);
        double scale = field_or<double>(t, "scale", 2.0);
        radnet::Rng rng(field_or<std::uint64_t>(t, "target_seed", 99));
        held = std::make_shared<radnet::DoubleNet>(radnet::random_net(lc.arch_for(nt), scale, rng));
        f = [held](const std::vector<double>& x) { return held->eval(x); };
    } else {
        radnet::RadialTarget rt = radial_target_from(cfg, lc.d);
        auto shared = std::make_shared<radnet::RadialTarget>(rt);
        f = [shared](const std::vector<double>& x) {
            std::vector<radnet::Real> xr;
            for (double xi : x) xr.emplace_back(xi, radnet::kMinPrecision);
            return shared->eval(xr).to_double();
        };
    }
    // sampled sup-norm of the target feeds the sigma/M feasibility check
    radnet::Rng srng(17);
    double sup = 0;
    for (int i = 0; i < 4000; ++i) sup = std::max(sup, std::abs(f(srng.ball_point(lc.d))));
    lc.target_sup = sup;
    if (lc.M < sup) lc.M = sup + 0.5;

    radnet::RateTable table = radnet::rate_sweep(f, m_list, trials, lc);
    write_file(fs::path(flags.out_dir) / "rate_learn.csv", table.to_csv());
    ordered_json echo;
    echo["config"] = cfg;
    echo["target_sup"] = sup;
    echo["fitted_slope"] = table.fitted_slope;
    write_file(fs::path(flags.out_dir) / "rate_learn_config.json", echo.dump(1));
    std::cout << table.to_csv();
    return 0;
}

int cmd_pack(const CommonFlags& flags) {
    json cfg = load_config(flags);
    int n_star = required_field<int>(cfg, "n_star");
    double r = field_or<double>(cfg, "r", 1.0);
    double c0 = field_or<double>(cfg, "c0", 1.0);
    bool sample = field_or<bool>(cfg, "sample", false);
    int cap = field_or<int>(cfg, "enumeration_cap", 16);
    long grid_points = field_or<long>(cfg, "grid_points", 10000);
    long holder_pairs = field_or<long>(cfg, "holder_pairs", 10000);
    std::uint64_t seed = field_or<std::uint64_t>(cfg, "seed", 0);
    if (n_star > cap && !sample)
        throw radnet::argument_error("N* exceeds the enumeration cap; pass \"sample\": true");

    radnet::PackingFamily fam = radnet::make_packing_family(n_star, r, c0);
    std::vector<radnet::SignVector> members;
    if (n_star <= cap) {
        members = radnet::enumerate_signs(n_star, cap);
    } else {
        radnet::Rng rng(seed);
        for (int i = 0; i < 64; ++i) members.push_back(radnet::sample_signs(n_star, rng));
    }
    const double expected = 2.0 * fam.bump.peak * fam.scale();
    double worst_rel = 0.0;
    long pairs_checked = 0;
    radnet::Rng prng(seed + 1);
    const long pair_budget = field_or<long>(cfg, "pair_budget", 400);
    for (long p = 0; p < pair_budget; ++p) {
        size_t i = static_cast<size_t>(prng.uniform() * members.size());
        size_t j = static_cast<size_t>(prng.uniform() * members.size());
        if (i == j || members[i] == members[j]) continue;
        double dist = radnet::pairwise_packing_distance(fam, members[i], members[j], grid_points);
        worst_rel = std::max(worst_rel, std::abs(dist - expected) / expected);
        ++pairs_checked;
    }
    double holder_worst = 0.0;
    for (size_t i = 0; i < std::min<size_t>(members.size(), 32); ++i)
        holder_worst = std::max(holder_worst,
                                radnet::member_sampled_holder(fam, members[i], holder_pairs, seed + i));
    const bool dist_ok = worst_rel <= 0.01;
    const bool holder_ok = holder_worst <= c0 * (1.0 + 1e-3);

    ordered_json rep;
    rep["config"] = cfg;
    rep["n_star"] = n_star;
    rep["r"] = r;
    rep["c0"] = c0;
    rep["bump_peak"] = fam.bump.peak;
    rep["bump_peak_is_nominal"] = fam.bump.peak_is_nominal;
    rep["expected_distance"] = expected;
    rep["pairs_checked"] = pairs_checked;
    rep["max_relative_distance_deviation"] = worst_rel;
    rep["sampled_holder_constant"] = holder_worst;
    rep["holder_cap"] = c0;
    rep["distance_pass"] = dist_ok;
    rep["holder_pass"] = holder_ok;
    rep["pass"] = dist_ok && holder_ok;
    write_file(fs::path(flags.out_dir) / "pack_report.json", rep.dump(1));
    std::cout << rep.dump(1) << "\n";
    return rep["pass"].get<bool>() ? 0 : 3;
}

int cmd_audit(const CommonFlags& flags) {
    json cfg = load_config(flags);
    std::string net_path = required_field<std::string>(cfg, "net");
    std::ifstream in(net_path);
    if (!in) throw radnet::argument_error("cannot open net document " + net_path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw radnet::parse_error("net document parse error: " + std::string(e.what()));
    }
    radnet::TreeNet net = radnet::TreeNet::from_json(doc);
    const unsigned prec = net.precision_bits();

    double alpha = field_or<double>(cfg, "alpha", 1.0);
    double R = field_or<double>(cfg, "R", -1.0);
    if (R <= 0) R = std::max(1.0, net.max_abs_param().to_double());
    radnet::BoundedClassSpec spec(radnet::Real(alpha, prec), radnet::Real(R, prec));
    radnet::BoundCheck bc = net.check_bounds(spec);
    radnet::Real cover = radnet::covering_bound_log2(
        net.arch(), spec, radnet::Real(field_or<double>(cfg, "c1", 1.0), prec),
        radnet::Real(field_or<double>(cfg, "eps", 1.0), prec));

    ordered_json rep;
    rep["config"] = cfg;
    rep["widths"] = net.arch().widths;
    rep["param_count"] = net.arch().param_count();
    rep["structural_param_count"] = net.structural_param_count();
    rep["max_abs_param"] = net.max_abs_param().to_double();
    rep["bounds_ok"] = bc.ok;
    rep["worst_param"] = bc.worst_where;
    rep["covering_bound_log2"] = cover.to_double();
    write_file(fs::path(flags.out_dir) / "audit.json", rep.dump(1));
    std::cout << rep.dump(1) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive deep nets for radial functions: builders, audits, and rate sweeps"};
    app.require_subcommand(1);

    CommonFlags flags;
    app.add_option("--config", flags.config_path, "JSON config file");
    app.add_option("--seed", flags.seed, "seed override");
    app.add_option("--precision-bits", flags.precision_bits, "working precision override");
    app.add_option("--out", flags.out_dir, "output directory");
    app.add_option("--activation", flags.activation, "activation name override");
    app.add_option("--override", flags.overrides, "KEY=VALUE config override (repeatable)");

    auto* build = app.add_subcommand("build", "construct a radial net and write net.json + report.json");
    auto* rate_approx = app.add_subcommand("rate-approx", "approximation-rate sweep over n");
    auto* rate_learn = app.add_subcommand("rate-learn", "ERM learning-rate sweep over m");
    auto* pack = app.add_subcommand("pack", "generate and audit a packing family");
    auto* audit = app.add_subcommand("audit", "parameter and capacity audit of a saved net");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return cmd_build(flags);
        if (rate_approx->parsed()) return cmd_rate_approx(flags);
        if (rate_learn->parsed()) return cmd_rate_learn(flags);
        if (pack->parsed()) return cmd_pack(flags);
        if (audit->parsed()) return cmd_audit(flags);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const radnet::argument_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const radnet::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const radnet::training_error& e) {
        std::cerr << "training failure: " << e.what() << "\n";
        return 4;
    } catch (const radnet::precision_error& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
