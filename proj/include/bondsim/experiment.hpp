#pragma once

// Declarative experiment runner behind the CLI: strict JSON config in,
// CSV data + JSON summary out. Identical config and seed produce
// byte-identical CSV (shortest round-trip number formatting, ordered
// writes, thread-count-independent ensembles).

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "bondsim/bondsim.hpp"

namespace bondsim {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment;
    ModelParams model;
    bool has_cir_model = false; // cir experiments parse only {c, a, r, d}
    CirParams cir;

    // numerics (documented defaults)
    double dt = 1e-3;
    double horizon = 10.0;
    std::size_t n_paths = 1;
    std::size_t n_terms = 50;
    double rel_tol = 1e-9;
    double n0 = 0.0;
    double x0 = 0.0;
    double t = 1.0;
    std::optional<double> target;
    long K = 1;
    double eta = 1.0;
    std::string regime = "accelerated_creation";
    std::string mode = "exact_roots";
    std::vector<double> t_grid;
    std::vector<double> u_values;
    std::vector<double> alpha_grid;
    std::vector<long> K_values;
    double burn_in = 20.0;
    double spacing = 5.0;
    double grid_max = 0.0; // 0 = auto
    std::size_t grid_points = 200;
    unsigned D = 2;
    unsigned moment_k = 1;

    std::uint64_t seed = 1;
    std::string output = "out";
    unsigned threads = 1;
};

namespace detail {

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "ssa",         "renorm",         "ode",      "equilibria",    "sde",
        "cir_density", "cir_stationary", "fpt_spectral", "laplace_check", "mfpt",
        "sweep_u",     "convergence",    "ou_repr"};
    return names;
}

inline void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

inline double need_num(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) throw ConfigError("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

inline std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[v & 0xf];
        v >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

class CsvWriter {
public:
    void header(std::initializer_list<const char*> cols) {
        bool first = true;
        for (auto* c : cols) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }
    template <class... Ts>
    void row(Ts... vals) {
        bool first = true;
        auto put = [&](auto v) {
            if (!first) out_ << ',';
            first = false;
            if constexpr (std::is_convertible_v<decltype(v), std::string>)
                out_ << std::string(v);
            else if constexpr (std::is_integral_v<decltype(v)>)
                out_ << v;
            else
                out_ << fmt(static_cast<double>(v));
        };
        (put(vals), ...);
        out_ << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

} // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    detail::reject_unknown(j, {"experiment", "model", "numerics", "seed", "output"}, "config");
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config requires a string 'experiment'");
    cfg.experiment = j["experiment"].get<std::string>();
    bool known = false;
    for (const auto& n : detail::experiment_names())
        if (n == cfg.experiment) known = true;
    if (!known) throw ConfigError("unknown experiment '" + cfg.experiment + "'");

    cfg.has_cir_model = cfg.experiment.rfind("cir_", 0) == 0 ||
                        cfg.experiment == "fpt_spectral" || cfg.experiment == "laplace_check" ||
                        cfg.experiment == "ou_repr";

    if (!j.contains("model") || !j["model"].is_object())
        throw ConfigError("config requires an object 'model'");
    const json& m = j["model"];
    if (cfg.has_cir_model) {
        detail::reject_unknown(m, {"c", "a", "r", "d"}, "model");
        cfg.cir.c = detail::need_num(m, "c", "model");
        cfg.cir.a = detail::need_num(m, "a", "model");
        cfg.cir.r = detail::need_num(m, "r", "model");
        cfg.cir.d = detail::need_num(m, "d", "model");
        cfg.cir.validate();
    } else {
        detail::reject_unknown(m, {"u", "u_star", "gamma", "c", "r", "d", "alpha", "a"}, "model");
        cfg.model.u = detail::need_num(m, "u", "model");
        cfg.model.gamma = detail::need_num(m, "gamma", "model");
        cfg.model.c = detail::need_num(m, "c", "model");
        cfg.model.r = detail::need_num(m, "r", "model");
        cfg.model.d = detail::need_num(m, "d", "model");
        cfg.model.alpha = detail::need_num(m, "alpha", "model");
        cfg.model.a = detail::need_num(m, "a", "model");
        if (m.contains("u_star")) cfg.model.u_star = m["u_star"].get<double>();
        cfg.model.validate();
    }

    if (j.contains("numerics")) {
        const json& n = j["numerics"];
        detail::reject_unknown(n,
                               {"dt", "horizon", "n_paths", "n_terms", "rel_tol", "n0", "x0",
                                "t", "target", "K", "eta", "regime", "mode", "t_grid",
                                "u_values", "alpha_grid", "K_values", "burn_in", "spacing",
                                "grid_max", "grid_points", "D", "moment_k"},
                               "numerics");
        auto opt = [&](const char* key, auto& field) {
            if (n.contains(key)) field = n[key].get<std::decay_t<decltype(field)>>();
        };
        opt("dt", cfg.dt);
        opt("horizon", cfg.horizon);
        opt("n_paths", cfg.n_paths);
        opt("n_terms", cfg.n_terms);
        opt("rel_tol", cfg.rel_tol);
        opt("n0", cfg.n0);
        opt("x0", cfg.x0);
        opt("t", cfg.t);
        if (n.contains("target")) cfg.target = n["target"].get<double>();
        opt("K", cfg.K);
        opt("eta", cfg.eta);
        opt("regime", cfg.regime);
        opt("mode", cfg.mode);
        opt("t_grid", cfg.t_grid);
        opt("u_values", cfg.u_values);
        opt("alpha_grid", cfg.alpha_grid);
        opt("K_values", cfg.K_values);
        opt("burn_in", cfg.burn_in);
        opt("spacing", cfg.spacing);
        opt("grid_max", cfg.grid_max);
        opt("grid_points", cfg.grid_points);
        opt("D", cfg.D);
        opt("moment_k", cfg.moment_k);
        if (!(cfg.dt > 0) || !(cfg.horizon > 0) || !(cfg.rel_tol > 0))
            throw ConfigError("numerics: dt, horizon, rel_tol must be > 0");
        if (cfg.n_paths < 1 || cfg.n_terms < 1 || cfg.grid_points < 2)
            throw ConfigError("numerics: counts out of range");
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    return cfg;
}

inline RegimeKind regime_from_string(const std::string& s) {
    if (s == "accelerated_creation") return RegimeKind::accelerated_creation;
    if (s == "non_accelerated") return RegimeKind::non_accelerated;
    if (s == "accelerated_demography") return RegimeKind::accelerated_demography;
    throw ConfigError("unknown regime '" + s + "'");
}

inline SpectralMode mode_from_string(const std::string& s) {
    if (s == "exact_roots") return SpectralMode::exact_roots;
    if (s == "asymptotic") return SpectralMode::asymptotic;
    if (s == "hybrid") return SpectralMode::hybrid;
    throw ConfigError("unknown spectral mode '" + s + "'");
}

struct RunResult {
    int exit_code = 0;
    std::string csv_path;
    std::string json_path;
};

namespace detail {

inline std::vector<double> default_t_grid(const ExperimentConfig& cfg) {
    if (!cfg.t_grid.empty()) return cfg.t_grid;
    std::vector<double> g;
    const std::size_t n = 50;
    for (std::size_t i = 1; i <= n; ++i)
        g.push_back(cfg.horizon * static_cast<double>(i) / static_cast<double>(n));
    return g;
}

inline void dump_path_csv(CsvWriter& csv, const Trajectory& traj, const ModelParams& p) {
    csv.header({"t", "n", "v"});
    for (std::size_t i = 0; i < traj.size(); ++i)
        csv.row(traj.times[i], traj.states[i], velocity(traj.states[i], p));
}

// per-experiment payloads; each fills the CSV and adds derived JSON fields
inline void run_ssa(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    const long n0 = static_cast<long>(std::llround(cfg.n0));
    if (cfg.n_paths == 1) {
        auto traj = simulate_ssa(cfg.model, n0, cfg.horizon, false, cfg.seed);
        dump_path_csv(csv, traj, cfg.model);
        summary["stopped_reason"] = to_string(traj.stopped_reason);
        return;
    }
    auto grid = default_t_grid(cfg);
    auto stats = ensemble_stats(cfg.model, n0, grid, cfg.n_paths, cfg.seed, cfg.threads);
    csv.header({"t", "mean", "variance", "stderr"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv.row(grid[i], stats[i].mean, stats[i].variance, stats[i].stderr_);
}

inline void run_renorm(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    ScalingRegime regime{regime_from_string(cfg.regime), cfg.K, cfg.eta};
    auto traj = simulate_renormalized(cfg.model, regime, cfg.x0, cfg.horizon, cfg.seed);
    dump_path_csv(csv, traj, cfg.model);
    summary["stopped_reason"] = to_string(traj.stopped_reason);
}

inline void run_ode(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    std::size_t clipped = 0;
    auto traj = ode_integrate(cfg.model, cfg.n0, cfg.horizon, cfg.dt, true, &clipped);
    dump_path_csv(csv, traj, cfg.model);
    summary["clipped_steps"] = clipped;
}

inline void run_equilibria(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    auto rep = classify_equilibria(cfg.model);
    csv.header({"value", "stability"});
    for (const auto& e : rep.equilibria) {
        csv.row(std::isinf(e.value) ? std::string("inf") : fmt(e.value),
                to_string(e.stability));
    }
    summary["case_label"] = rep.case_label;
    if (std::isfinite(rep.nbar)) {
        summary["nbar"] = rep.nbar;
        summary["F_at_nbar"] = rep.F_at_nbar;
    }
}

inline void run_sde(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    auto traj = euler_symmetrized(cfg.model, cfg.n0, cfg.dt, cfg.horizon, cfg.target, cfg.seed);
    dump_path_csv(csv, traj, cfg.model);
    summary["stopped_reason"] = to_string(traj.stopped_reason);
    auto bk = berkaoui_valid(cfg.model.c, std::max(cfg.model.a, 1e-300),
                             std::max(std::abs(cfg.model.r - cfg.model.d), 1e-6), cfg.dt);
    summary["berkaoui"] = {{"valid", bk.valid},
                           {"lhs", bk.lhs},
                           {"threshold", bk.threshold},
                           {"margin", bk.margin},
                           {"dt_margin", bk.dt_margin}};
}

inline void run_cir_density(const ExperimentConfig& cfg, CsvWriter& csv, json&) {
    const double hi = cfg.grid_max > 0
                          ? cfg.grid_max
                          : mean_var(cfg.t, cfg.n0, cfg.cir).first +
                                6.0 * std::sqrt(mean_var(cfg.t, cfg.n0, cfg.cir).second);
    csv.header({"n", "p"});
    for (std::size_t i = 1; i <= cfg.grid_points; ++i) {
        const double n = hi * static_cast<double>(i) / static_cast<double>(cfg.grid_points);
        csv.row(n, transition_density(n, cfg.t, cfg.n0, cfg.cir));
    }
}

inline void run_cir_stationary(const ExperimentConfig& cfg, CsvWriter& csv, json&) {
    cfg.cir.require_subcritical();
    const double mean = cfg.cir.c / (cfg.cir.d - cfg.cir.r);
    const double hi = cfg.grid_max > 0 ? cfg.grid_max : 8.0 * mean;
    csv.header({"n", "p"});
    for (std::size_t i = 1; i <= cfg.grid_points; ++i) {
        const double n = hi * static_cast<double>(i) / static_cast<double>(cfg.grid_points);
        csv.row(n, stationary_density(n, cfg.cir));
    }
}

inline void run_fpt_spectral(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    const double y = cfg.n0;
    const double x = cfg.target.value_or(1.0);
    auto se = spectral_fpt(y, x, cfg.cir, cfg.n_terms, mode_from_string(cfg.mode));
    csv.header({"index", "s_n", "lambda_n", "o_n"});
    for (std::size_t i = 0; i < se.eigenvalues.size(); ++i)
        csv.row(i + 1, se.roots[i], se.eigenvalues[i], se.coefficients[i]);
    summary["mass"] = spectral_mass(se);
    summary["lambda_1"] = se.eigenvalues.front();
}

inline void run_laplace_check(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    const double y = cfg.n0;
    const double x = cfg.target.value_or(1.0);
    auto se = spectral_fpt(y, x, cfg.cir, cfg.n_terms, mode_from_string(cfg.mode));
    std::vector<double> grid = cfg.alpha_grid;
    if (grid.empty()) grid = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    csv.header({"alpha", "kummer", "spectral", "abs_diff"});
    double worst = 0.0;
    for (double al : grid) {
        const double lk = laplace_fpt(al, y, x, cfg.cir);
        const double ls = spectral_laplace(se, al);
        worst = std::max(worst, std::abs(lk - ls));
        csv.row(al, lk, ls, std::abs(lk - ls));
    }
    summary["max_abs_diff"] = worst;
}

inline void run_mfpt(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    QuadControl quad{cfg.rel_tol, 1e-12};
    csv.header({"n0", "tau"});
    const double tau = cfg.moment_k <= 1 ? mean_fpt(cfg.n0, cfg.model, quad)
                                         : moment_fpt(cfg.moment_k, cfg.n0, cfg.model, quad);
    csv.row(cfg.n0, tau);
    summary["tau"] = tau;
    summary["moment_k"] = cfg.moment_k;
}

inline void run_sweep_u(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    std::vector<double> us = cfg.u_values;
    if (us.empty())
        for (double u = 0.25; u <= 4.0 + 1e-12; u += 0.25) us.push_back(u);
    QuadControl quad{cfg.rel_tol, 1e-12};
    auto curve = sweep_u(us, cfg.model, cfg.n0, quad);
    csv.header({"u", "tau", "ok"});
    json failures = json::array();
    for (const auto& pt : curve) {
        csv.row(pt.u, pt.ok ? pt.tau : std::numeric_limits<double>::quiet_NaN(),
                pt.ok ? 1 : 0);
        if (!pt.ok) failures.push_back({{"u", pt.u}, {"error", pt.error}});
    }
    summary["failures"] = failures;
}

inline void run_convergence(const ExperimentConfig& cfg, CsvWriter& csv, json&) {
    std::vector<long> Ks = cfg.K_values;
    if (Ks.empty()) Ks = {10, 100, 1000};
    auto grid = default_t_grid(cfg);
    auto ode = ode_integrate(cfg.model, cfg.x0, cfg.horizon, 1e-4);
    csv.header({"K", "mean_sup_err"});
    for (long K : Ks) {
        ScalingRegime regime{regime_from_string(cfg.regime), K, cfg.eta};
        auto sups = parallel_map<double>(cfg.n_paths, cfg.threads, [&](std::size_t i) {
            auto traj = simulate_renormalized(cfg.model, regime, cfg.x0, cfg.horizon,
                                              Rng::stream_seed(cfg.seed, i));
            double sup = 0.0;
            for (double t : grid)
                sup = std::max(sup, std::abs(traj.value_at(t) - ode.value_at(t)));
            return sup;
        });
        csv.row(K, summarize(sups).mean);
    }
}

inline void run_ou_repr(const ExperimentConfig& cfg, CsvWriter& csv, json& summary) {
    cfg.cir.require_subcritical();
    const double delta = cfg.cir.delta();
    const auto D = static_cast<unsigned>(std::llround(delta));
    if (std::abs(delta - static_cast<double>(D)) > 1e-9 || D < 1)
        throw std::domain_error("ou_repr: 2c/a must be a positive integer");
    const double beta = cfg.cir.d - cfg.cir.r;
    const double sigma_ou = std::sqrt(2.0 * cfg.cir.a);
    ModelParams cm;
    cm.u = 1.0;
    cm.u_star = std::numeric_limits<double>::infinity();
    cm.gamma = 1.0;
    cm.c = cfg.cir.c;
    cm.r = cfg.cir.r;
    cm.d = cfg.cir.d;
    cm.alpha = 0.0;
    cm.a = cfg.cir.a;
    auto ou = parallel_map<double>(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        return simulate_squared_ou(D, beta, sigma_ou, cfg.n0, cfg.dt, cfg.t,
                                   Rng::stream_seed(cfg.seed, i))
            .states.back();
    });
    auto cirm = parallel_map<double>(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        return euler_symmetrized(cm, cfg.n0, cfg.dt, cfg.t, std::nullopt,
                                 Rng::stream_seed(cfg.seed ^ 0x5bf03635ULL, i))
            .states.back();
    });
    csv.header({"index", "squared_ou", "cir"});
    for (std::size_t i = 0; i < ou.size(); ++i) csv.row(i, ou[i], cirm[i]);
    summary["ks_two_sample"] = ks_two_sample(ou, cirm);
}

} // namespace detail

/// Executes a parsed experiment; writes <output>.csv and <output>.json.
/// Exit codes: 0 success, 2 validation error, 3 numerical failure.
inline RunResult run(const ExperimentConfig& cfg, const json& echoed_config) {
    RunResult rr;
    rr.csv_path = cfg.output + ".csv";
    rr.json_path = cfg.output + ".json";
    json summary;
    summary["config"] = echoed_config;
    detail::CsvWriter csv;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (cfg.has_cir_model) {
            summary["derived"] = {{"delta", cfg.cir.delta()},
                                  {"kappa", cfg.cir.kappa()},
                                  {"nu", cfg.cir.nu()}};
        } else {
            summary["derived"] = {{"n_star", cfg.model.n_star()}};
        }
        if (cfg.experiment == "ssa") detail::run_ssa(cfg, csv, summary);
        else if (cfg.experiment == "renorm") detail::run_renorm(cfg, csv, summary);
        else if (cfg.experiment == "ode") detail::run_ode(cfg, csv, summary);
        else if (cfg.experiment == "equilibria") detail::run_equilibria(cfg, csv, summary);
        else if (cfg.experiment == "sde") detail::run_sde(cfg, csv, summary);
        else if (cfg.experiment == "cir_density") detail::run_cir_density(cfg, csv, summary);
        else if (cfg.experiment == "cir_stationary") detail::run_cir_stationary(cfg, csv, summary);
        else if (cfg.experiment == "fpt_spectral") detail::run_fpt_spectral(cfg, csv, summary);
        else if (cfg.experiment == "laplace_check") detail::run_laplace_check(cfg, csv, summary);
        else if (cfg.experiment == "mfpt") detail::run_mfpt(cfg, csv, summary);
        else if (cfg.experiment == "sweep_u") detail::run_sweep_u(cfg, csv, summary);
        else if (cfg.experiment == "convergence") detail::run_convergence(cfg, csv, summary);
        else if (cfg.experiment == "ou_repr") detail::run_ou_repr(cfg, csv, summary);
        else throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        summary["numerical_failure"] = e.what();
        rr.exit_code = 3;
    }
    const auto t1 = std::chrono::steady_clock::now();
    summary["runtime_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    const std::string csv_text = csv.str();
    summary["csv_checksum_fnv1a"] = detail::hex64(detail::fnv1a(csv_text));
    {
        std::ofstream f(rr.csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + rr.csv_path);
        f << csv_text;
    }
    {
        std::ofstream f(rr.json_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + rr.json_path);
        f << summary.dump(2) << '\n';
    }
    return rr;
}

} // namespace bondsim
