#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>

#include "hout/serialize.hpp"

namespace {

using hout::Json;

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw hout::ParameterError(what + ": unknown key '" + key + "'");
}

hout::DecompOptions decomp_options(double tau, double eig_tol, int max_iters, int max_terms,
                                   std::uint64_t seed) {
    hout::DecompOptions opts;
    opts.tau = tau;
    opts.eig_tol = eig_tol;
    opts.max_iters = max_iters;
    opts.max_terms = max_terms;
    opts.seed = seed;
    return opts;
}

int run_decompose(const std::string& input, const std::string& out, const std::string& residuals_csv,
                  double tau, double eig_tol, int max_iters, int max_terms, std::uint64_t seed) {
    const hout::SymTensor t = hout::tensor_from_json(hout::read_json_file(input));
    const hout::Rank1Decomposition dec =
        hout::approx_rank1_decompose(t, decomp_options(tau, eig_tol, max_iters, max_terms, seed));
    hout::write_json_file(out, hout::decomposition_to_json(dec));
    if (!residuals_csv.empty()) hout::write_file(residuals_csv, hout::decomposition_residuals_csv(dec));
    return 0;
}

int run_sut(const std::string& moments_path, double beta, const std::string& out,
            const std::string& json_out) {
    const hout::MomentSet m = hout::moments_from_json(hout::read_json_file(moments_path));
    const hout::SigmaEnsemble e = hout::sut(m.mean, m.cov.to_matrix(), beta);
    hout::write_file(out, hout::ensemble_to_csv(e));
    if (!json_out.empty()) hout::write_json_file(json_out, hout::ensemble_to_json(e));
    return 0;
}

int run_hout(const std::string& moments_path, double tau, std::optional<double> gamma,
             const std::string& out, const std::string& json_out, std::uint64_t seed) {
    const hout::MomentSet m = hout::moments_from_json(hout::read_json_file(moments_path));
    hout::DecompOptions opts;
    opts.seed = seed;
    const hout::HoutParams p = hout::hout_params(m, tau, gamma, opts);
    const hout::SigmaEnsemble e = hout::hout(m, p);
    hout::write_file(out, hout::ensemble_to_csv(e));
    if (!json_out.empty()) hout::write_json_file(json_out, hout::ensemble_to_json(e));
    return 0;
}

int run_propagate(const std::string& ensemble_path, const std::string& poly_path, const std::string& out) {
    const Json ej = hout::read_json_file(ensemble_path);
    hout::SigmaEnsemble e;
    e.generator = ej.value("generator", "");
    for (const auto& n : ej.at("nodes")) {
        const auto vals = n.get<std::vector<double>>();
        e.nodes.push_back(Eigen::Map<const hout::Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    e.weights = ej.at("weights").get<std::vector<double>>();
    if (e.nodes.size() != e.weights.size())
        throw hout::ShapeError("propagate: node and weight counts differ");

    const Json pj = hout::read_json_file(poly_path);
    reject_unknown_keys(pj, {"a", "b", "power", "c"}, "polynomial spec");
    hout::PolySpec spec;
    const auto a = pj.at("a").get<std::vector<double>>();
    const auto b = pj.at("b").get<std::vector<double>>();
    spec.a = Eigen::Map<const hout::Vector>(a.data(), static_cast<Eigen::Index>(a.size()));
    spec.b = Eigen::Map<const hout::Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    spec.power = pj.at("power").get<int>();
    const double c = pj.at("c").get<double>();

    const hout::PropagationResult r = hout::propagate(e, hout::poly_f(spec, c));
    Json outputs = Json::array();
    for (const auto& y : r.outputs) outputs.push_back(std::vector<double>(y.data(), y.data() + y.size()));
    hout::write_json_file(out, Json{{"outputs", outputs}, {"moments", hout::moments_to_json(r.moments)}});
    return 0;
}

int run_poly_study(const std::string& config_path, const std::string& out, const std::string& summary) {
    const Json cfg = hout::read_json_file(config_path);
    reject_unknown_keys(cfg, {"dim", "ensemble_size", "seed", "tau", "powers", "c_values", "sut_beta"},
                        "poly-study config");
    const int dim = cfg.value("dim", 2);
    const int ensemble_size = cfg.value("ensemble_size", 20000);
    const std::uint64_t seed = cfg.value("seed", 0ull);
    const double tau = cfg.value("tau", 1e-5);
    const auto powers = cfg.value("powers", std::vector<int>{2, 3, 4, 5});
    const auto c_values = cfg.value("c_values", std::vector<double>{0.01, 0.1, 1.0});
    const double sut_beta = cfg.value("sut_beta", std::sqrt(2.0));

    const auto ng = hout::NonGaussianSpec::random(dim, ensemble_size, seed);
    const auto polys = hout::random_poly_specs(seed + 17, dim, powers);
    const auto rows = hout::polynomial_study(ng, polys, c_values, tau, sut_beta);
    hout::write_file(out, hout::poly_study_csv(rows));
    if (!summary.empty()) {
        Json j = Json::array();
        for (const auto& r : rows)
            j.push_back(Json{{"power", r.power},
                             {"c", r.c},
                             {"hout_mean_err", r.hout_mean_err},
                             {"hout_var_err", r.hout_var_err},
                             {"sut_mean_err", r.sut_mean_err},
                             {"sut_var_err", r.sut_var_err},
                             {"mc_mean_se", r.mc_mean_se},
                             {"mc_var_se", r.mc_var_se}});
        hout::write_json_file(summary, j);
    }
    return 0;
}

int run_lorenz_study(const std::string& config_path, const std::string& out, const std::string& summary) {
    const Json cfg = hout::read_json_file(config_path);
    reject_unknown_keys(cfg,
                        {"sigma", "rho", "beta", "dt", "spinup_steps", "forecast_steps", "trials",
                         "noise_scale", "ensemble_size", "sut_beta", "seed", "tau"},
                        "lorenz-study config");
    hout::LorenzSpec spec;
    spec.sigma = cfg.value("sigma", spec.sigma);
    spec.rho = cfg.value("rho", spec.rho);
    spec.beta = cfg.value("beta", spec.beta);
    spec.dt = cfg.value("dt", spec.dt);
    spec.spinup_steps = cfg.value("spinup_steps", spec.spinup_steps);
    spec.forecast_steps = cfg.value("forecast_steps", spec.forecast_steps);
    spec.trials = cfg.value("trials", spec.trials);
    spec.noise_scale = cfg.value("noise_scale", spec.noise_scale);
    spec.ensemble_size = cfg.value("ensemble_size", spec.ensemble_size);
    spec.sut_beta = cfg.value("sut_beta", spec.sut_beta);
    spec.seed = cfg.value("seed", 0ull);
    const double tau = cfg.value("tau", 1e-5);

    const hout::SkillReport report = hout::forecast_study(spec, tau);
    hout::write_file(out, hout::skill_report_csv(report));
    if (!summary.empty()) hout::write_json_file(summary, hout::skill_report_to_json(report));
    return 0;
}

int run_verify_bounds(const std::string& input, int grid, const std::string& out) {
    const hout::SymTensor t = hout::tensor_from_json(hout::read_json_file(input));
    const hout::EntryBoundCheck chk = hout::verify_entry_bound(t, grid);
    const double c = hout::BoundConstants::c(t.order());
    hout::write_json_file(out, Json{{"lambda_maxabs", chk.lambda_maxabs},
                                    {"max_entry", chk.max_entry},
                                    {"ratio", chk.ratio},
                                    {"bound_constant", c},
                                    {"satisfied", chk.ratio >= c}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Higher order unscented transform toolkit"};
    app.require_subcommand(1);

    std::string input, moments_path, ensemble_path, poly_path, config_path;
    std::string out, json_out, residuals_csv, summary;
    double tau = 1e-5, beta = std::sqrt(3.0), eig_tol = 1e-12;
    std::optional<double> gamma;
    int max_iters = 500, max_terms = 0, grid = 720;
    std::uint64_t seed = 0;

    auto* decompose = app.add_subcommand("decompose", "Approximate rank-1 decomposition of a symmetric tensor");
    decompose->add_option("--input", input, "Tensor JSON {order,dim,entries}")->required();
    decompose->add_option("--tau", tau, "Frobenius residual tolerance")->required();
    decompose->add_option("--out", out, "Decomposition JSON output")->required();
    decompose->add_option("--residuals-csv", residuals_csv, "Per-iteration residual CSV (iteration,norm,ratio)");
    decompose->add_option("--eig-tol", eig_tol, "Power-method eigenvalue tolerance");
    decompose->add_option("--max-iters", max_iters, "Power-method iteration cap");
    decompose->add_option("--max-terms", max_terms, "Term budget (0 = 10 d^k)");
    decompose->add_option("--seed", seed, "Seed for restart draws");

    auto* sut_cmd = app.add_subcommand("sut", "Scaled unscented transform sigma points");
    sut_cmd->add_option("--moments", moments_path, "MomentSet JSON {mu,C,S,K}")->required();
    sut_cmd->add_option("--beta", beta, "Node spread parameter");
    sut_cmd->add_option("--out", out, "CSV output (index,weight,x_1..x_d)")->required();
    sut_cmd->add_option("--json", json_out, "JSON mirror of the ensemble");

    auto* hout_cmd = app.add_subcommand("hout", "Higher order unscented transform sigma points");
    hout_cmd->add_option("--moments", moments_path, "MomentSet JSON {mu,C,S,K}")->required();
    hout_cmd->add_option("--tau", tau, "Skewness/kurtosis matching tolerance")->required();
    hout_cmd->add_option("--gamma", gamma, "Skew-node spread override (default J^{-1/3})");
    hout_cmd->add_option("--out", out, "CSV output (index,weight,x_1..x_d)")->required();
    hout_cmd->add_option("--json", json_out, "JSON mirror of the ensemble");
    hout_cmd->add_option("--seed", seed, "Seed for decomposition restart draws");

    auto* prop = app.add_subcommand("propagate", "Push an ensemble through a polynomial map");
    prop->add_option("--ensemble", ensemble_path, "Ensemble JSON (as written by sut/hout --json)")->required();
    prop->add_option("--poly", poly_path, "Polynomial spec JSON {a,b,power,c}")->required();
    prop->add_option("--out", out, "Outputs + weighted moments JSON")->required();

    auto* poly_study = app.add_subcommand("poly-study", "Polynomial exactness sweep on the non-Gaussian input");
    poly_study->add_option("--config", config_path, "Study config JSON")->required();
    poly_study->add_option("--out", out, "CSV output (power,c,hout_mean_err,hout_var_err,sut_mean_err,sut_var_err,mc_mean_se,mc_var_se)")->required();
    poly_study->add_option("--summary", summary, "JSON mirror of the rows");

    auto* lorenz = app.add_subcommand("lorenz-study", "Lorenz-63 forecast-skill comparison");
    lorenz->add_option("--config", config_path, "Study config JSON")->required();
    lorenz->add_option("--out", out, "CSV output (step,hout_*,sut_* geometric-mean errors)")->required();
    lorenz->add_option("--summary", summary, "JSON summary");

    auto* verify = app.add_subcommand("verify-bounds", "Sphere-search check of the entry-eigenvalue bound");
    verify->add_option("--input", input, "Tensor JSON")->required();
    verify->add_option("--grid", grid, "Sphere grid resolution");
    verify->add_option("--out", out, "Result JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (decompose->parsed())
            return run_decompose(input, out, residuals_csv, tau, eig_tol, max_iters, max_terms, seed);
        if (sut_cmd->parsed()) return run_sut(moments_path, beta, out, json_out);
        if (hout_cmd->parsed()) return run_hout(moments_path, tau, gamma, out, json_out, seed);
        if (prop->parsed()) return run_propagate(ensemble_path, poly_path, out);
        if (poly_study->parsed()) return run_poly_study(config_path, out, summary);
        if (lorenz->parsed()) return run_lorenz_study(config_path, out, summary);
        if (verify->parsed()) return run_verify_bounds(input, grid, out);
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", e.what()}, {"operation", command}}.dump() << std::endl;
        return 1;
    }
    return 2;
}
