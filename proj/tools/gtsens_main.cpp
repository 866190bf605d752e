#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gtsens/builtin.hpp"
#include "gtsens/estimator.hpp"
#include "gtsens/json_io.hpp"
#include "gtsens/network.hpp"
#include "gtsens/oracles.hpp"
#include "gtsens/simulator.hpp"
#include "gtsens/validity.hpp"

using nlohmann::json;
using namespace gtsens;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitExplosion = 3;
constexpr int kExitInconclusive = 4;

struct GlobalOpts {
    std::string model;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out;
    std::string format;
};

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(g.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file \"" + g.out + "\"");
        f << text;
    }
}

json run_config_json(const GlobalOpts& g, const LoadedModel& model) {
    return json{{"model", model.source},
                {"model_hash", model.hash},
                {"seed", g.seed},
                {"threads", g.threads}};
}

double wallclock_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::size_t> targets_for(const ReactionNetwork& net, const std::string& target) {
    if (!target.empty()) return {net.channel_of_param(target)};
    std::vector<std::size_t> all(net.n_reactions());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood-ratio sensitivity estimation for stochastic reaction networks,\n"
                 "with static validity certification and Monte Carlo diagnostics."};
    app.require_subcommand(1);

    GlobalOpts g;
    double T = 1.0;
    std::uint64_t n = 100000;
    std::uint64_t max_events = 10'000'000;
    std::uint64_t replicate = 0;
    std::string target_param;
    std::string f_expr = "x1";
    std::string method = "gt";
    std::string sim_method = "nrm";
    double fd_h = 0.0;
    bool crn = false;
    bool force = false;
    bool require_valid = false;
    std::uint64_t probe_n = 0;
    std::vector<double> rho_grid{1.1, 1.25, 1.5};
    std::vector<double> eps_scales{0.1, 0.25, 0.5};
    std::string oracle_kind;
    std::int64_t oracle_x0 = 1;
    double oracle_c = 1.0, oracle_d = 1.0, oracle_t = 1.0, oracle_eps = 0.1;
    std::int64_t oracle_k = 0;

    app.add_option("--model", g.model, "builtin model name or model file path");
    app.add_option("--seed", g.seed, "RNG seed (runs are deterministic given seed)");
    app.add_option("--threads", g.threads, "replicate threads (0 = runtime default)");
    app.add_option("--out", g.out, "write output to this file instead of stdout");
    app.add_option("--format", g.format, "output format where applicable: json or text");
    app.fallthrough();

    auto* cmd_simulate = app.add_subcommand("simulate", "simulate one path and dump it as CSV");
    cmd_simulate->add_option("--T", T, "terminal time");
    cmd_simulate->add_option("--replicate", replicate, "replicate index for the stream");
    cmd_simulate->add_option("--max-events", max_events, "event cap before the path is rejected");
    cmd_simulate->add_option("--sim-method", sim_method, "nrm (default) or direct");

    auto* cmd_estimate = app.add_subcommand("estimate", "estimate d/dc E f(X(T)) for one rate");
    cmd_estimate->add_option("--T", T, "terminal time");
    cmd_estimate->add_option("--N", n, "replicates");
    cmd_estimate->add_option("--max-events", max_events, "event cap per replicate");
    cmd_estimate->add_option("--target", target_param, "rate parameter to differentiate")
        ->required();
    cmd_estimate->add_option("--f", f_expr, "observable f as a polynomial in x1..xn");
    cmd_estimate->add_option("--method", method, "gt (default), fd-forward, or fd-central");
    cmd_estimate->add_option("--fd-h", fd_h, "finite-difference step (default 0.05 * c)");
    cmd_estimate->add_flag("--crn", crn, "common random numbers for the FD runs");
    cmd_estimate->add_flag("--force", force, "run the GT estimate even if validity is inconclusive");

    auto* cmd_check = app.add_subcommand("check", "static validity verdict per rate parameter");
    cmd_check->add_option("--target", target_param, "rate parameter (default: all)");
    cmd_check->add_flag("--require-valid", require_valid, "exit 4 on any inconclusive verdict");
    cmd_check->add_option("--with-probes", probe_n,
                          "attach Monte Carlo probes with this many replicates");
    cmd_check->add_option("--T", T, "terminal time for probes");

    auto* cmd_probe = app.add_subcommand("probe", "Monte Carlo exponential-moment probes");
    cmd_probe->add_option("--T", T, "terminal time");
    cmd_probe->add_option("--N", n, "replicates per probe");
    cmd_probe->add_option("--max-events", max_events, "event cap per replicate");
    cmd_probe->add_option("--target", target_param, "rate parameter")->required();
    cmd_probe->add_option("--rho", rho_grid, "right-tail factors c/c* (> 1)");
    cmd_probe->add_option("--eps", eps_scales, "left-tail epsilon grid, in units of c*");
    std::string probe_f;
    cmd_probe->add_option("--f", probe_f, "observable for the third-moment probe");

    auto* cmd_oracle = app.add_subcommand("oracle", "closed-form laws for the solvable models");
    cmd_oracle->add_option("--kind", oracle_kind,
                           "pure-birth-pmf | pure-birth-moments | pure-birth-threshold | "
                           "pure-birth-exp-moment | mono-immigration | mono-decay | "
                           "mono-immigration-decay")
        ->required();
    cmd_oracle->add_option("--x0", oracle_x0, "initial count");
    cmd_oracle->add_option("--c", oracle_c, "birth/immigration rate");
    cmd_oracle->add_option("--d", oracle_d, "decay rate");
    cmd_oracle->add_option("--t", oracle_t, "time");
    cmd_oracle->add_option("--k", oracle_k, "pmf offset: P(X = x0 + k)");
    cmd_oracle->add_option("--eps", oracle_eps, "exponent for the exponential moment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    auto t0 = std::chrono::steady_clock::now();
    try {
        if (*cmd_oracle) {
            json j;
            if (oracle_kind == "pure-birth-pmf") {
                PureBirthLaw law{oracle_x0, oracle_c, oracle_t};
                j = json{{"kind", oracle_kind}, {"x0", oracle_x0}, {"c", oracle_c},
                         {"t", oracle_t},       {"k", oracle_k},
                         {"pmf", pure_birth_pmf(law, oracle_k)}};
            } else if (oracle_kind == "pure-birth-moments") {
                PureBirthLaw law{oracle_x0, oracle_c, oracle_t};
                Moments m = pure_birth_moments(law);
                j = json{{"kind", oracle_kind},   {"x0", oracle_x0},
                         {"c", oracle_c},         {"t", oracle_t},
                         {"mean", m.mean},        {"variance", m.variance},
                         {"mean_sensitivity", pure_birth_mean_sensitivity(law)}};
            } else if (oracle_kind == "pure-birth-threshold") {
                PureBirthLaw law{oracle_x0, oracle_c, oracle_t};
                j = json{{"kind", oracle_kind}, {"c", oracle_c}, {"t", oracle_t},
                         {"threshold", pure_birth_exp_moment_threshold(law)}};
            } else if (oracle_kind == "pure-birth-exp-moment") {
                PureBirthLaw law{oracle_x0, oracle_c, oracle_t};
                j = json{{"kind", oracle_kind}, {"c", oracle_c},   {"t", oracle_t},
                         {"eps", oracle_eps},
                         {"finite", pure_birth_exp_moment_finite(law, oracle_eps)}};
            } else if (oracle_kind == "mono-immigration" || oracle_kind == "mono-decay" ||
                       oracle_kind == "mono-immigration-decay") {
                MonoKind kind = oracle_kind == "mono-immigration" ? MonoKind::Immigration
                                : oracle_kind == "mono-decay"     ? MonoKind::Decay
                                                                  : MonoKind::ImmigrationDecay;
                j = to_json(monomolecular_solution(kind, oracle_c, oracle_d, oracle_x0, oracle_t));
                j["kind"] = oracle_kind;
            } else {
                std::cerr << "unknown oracle kind \"" << oracle_kind << "\"\n";
                return kExitConfigError;
            }
            emit(g, j.dump(2) + "\n");
            return 0;
        }

        if (g.model.empty()) {
            std::cerr << "--model is required\n";
            return kExitConfigError;
        }
        LoadedModel model = load_model(g.model);

        if (*cmd_simulate) {
            SimConfig cfg{T, max_events, g.seed, replicate};
            SimMethod sm = sim_method == "direct" ? SimMethod::Direct : SimMethod::NextReaction;
            try {
                Trajectory traj = simulate(model.net, cfg, sm);
                emit(g, trajectory_csv(model.net, traj));
            } catch (const ExplosionGuardError& e) {
                std::cerr << "event cap exceeded: " << e.events << " events by t = "
                          << e.time_reached << "\n";
                return kExitExplosion;
            }
            return 0;
        }

        if (*cmd_check) {
            std::vector<std::size_t> targets = targets_for(model.net, target_param);
            bool all_valid = true;
            json out = json::array();
            std::string text;
            for (std::size_t ch : targets) {
                ValidityReport rep = check_gt_validity(model.net, ch);
                rep.model = model.source;
                if (probe_n > 0) {
                    ProbeConfig pc;
                    SimConfig cfg{T, max_events, g.seed, 0};
                    rep.probes = integrability_probe(model.net, ch, cfg, probe_n, pc, g.threads);
                }
                all_valid = all_valid && rep.valid;
                out.push_back(to_json(model.net, rep));
                text += render_report_text(model.net, rep);
            }
            emit(g, g.format == "json" ? out.dump(2) + "\n" : text);
            if (require_valid && !all_valid) return kExitInconclusive;
            return 0;
        }

        if (*cmd_estimate) {
            std::size_t ch = model.net.channel_of_param(target_param);
            Expression f = Expression::parse(f_expr, model.net.n_species());
            SimConfig cfg{T, max_events, g.seed, 0};

            if (method == "gt" && !force) {
                ValidityReport rep = check_gt_validity(model.net, ch);
                if (!rep.valid) {
                    std::cerr << "validity check inconclusive for " << target_param
                              << "; the estimate may be silently biased. Failed conditions:\n";
                    for (const auto& fail : rep.failures) std::cerr << "  - " << fail << "\n";
                    std::cerr << "rerun with --force to estimate anyway\n";
                    return kExitInconclusive;
                }
            }

            EstimatorResult r;
            std::string method_label;
            double c_star = model.net.rate[ch];
            try {
                if (method == "gt") {
                    r = gt_estimate(model.net, f, ch, cfg, n, g.threads);
                    method_label = "GT";
                } else if (method == "fd-forward" || method == "fd-central") {
                    double h = fd_h > 0.0 ? fd_h : 0.05 * c_star;
                    FdMode mode = method == "fd-central" ? FdMode::Central : FdMode::Forward;
                    r = fd_estimate(model.net, f, ch, cfg, n, h, mode, crn, g.threads);
                    method_label = method == "fd-central" ? "FD-central" : "FD-forward";
                } else {
                    std::cerr << "unknown method \"" << method << "\"\n";
                    return kExitConfigError;
                }
            } catch (const DiscardRateError& e) {
                std::cerr << e.what() << "\n";
                return kExitExplosion;
            }

            json j = to_json(r);
            j["model"] = model.source;
            j["f"] = f_expr;
            j["target_param"] = target_param;
            j["c_star"] = c_star;
            j["T"] = T;
            j["N"] = n;
            j["method"] = method_label;
            j["wallclock_s"] = wallclock_since(t0);
            json cfg_json = run_config_json(g, model);
            cfg_json["command"] = "estimate";
            cfg_json["max_events"] = max_events;
            if (method != "gt") {
                cfg_json["h"] = fd_h > 0.0 ? fd_h : 0.05 * c_star;
                cfg_json["crn"] = crn;
            }
            j["config"] = cfg_json;
            emit(g, j.dump(2) + "\n");
            return 0;
        }

        if (*cmd_probe) {
            std::size_t ch = model.net.channel_of_param(target_param);
            ProbeConfig pc;
            pc.right_rho = rho_grid;
            pc.left_eps_scale = eps_scales;
            if (!probe_f.empty()) pc.f = Expression::parse(probe_f, model.net.n_species());
            SimConfig cfg{T, max_events, g.seed, 0};
            std::vector<ProbeResult> probes =
                integrability_probe(model.net, ch, cfg, n, pc, g.threads);
            if (g.format == "json") {
                json out = json::array();
                for (const auto& p : probes) out.push_back(to_json(p));
                emit(g, out.dump(2) + "\n");
            } else {
                std::string text = "kind        parameter   estimate      stderr        top-share   "
                                   "split-z   status\n";
                char buf[256];
                for (const auto& p : probes) {
                    const char* kind = p.kind == ProbeKind::RightTail  ? "right-tail"
                                       : p.kind == ProbeKind::LeftTail ? "left-tail"
                                                                       : "moment-f3";
                    std::snprintf(buf, sizeof buf, "%-11s %-11.6g %-13.6g %-13.6g %-11.4g %-9.3g %s\n",
                                  kind, p.parameter, p.estimate, p.std_error, p.top_sample_share,
                                  p.split_z, p.stabilized ? "ok" : "UNSTABLE");
                    text += buf;
                }
                emit(g, text);
            }
            return 0;
        }
    } catch (const ModelParseError& e) {
        std::cerr << "model parse error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ExpressionError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const ExplosionGuardError& e) {
        std::cerr << e.what() << "\n";
        return kExitExplosion;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return 0;
}
