#include "hout/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace hout {

NonGaussianSpec NonGaussianSpec::random(int dim, int ensemble_size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    NonGaussianSpec spec;
    spec.dim = dim;
    spec.ensemble_size = ensemble_size;
    spec.seed = seed + 1;  // sampling stream distinct from the matrix draw
    spec.a = Matrix(dim, dim);
    spec.b = Matrix(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) spec.a(i, j) = gauss(rng);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) spec.b(i, j) = gauss(rng);
    return spec;
}

std::vector<Vector> sample_nongaussian(const NonGaussianSpec& spec) {
    if (spec.ensemble_size < 10) throw ParameterError("sample_nongaussian: ensemble_size must be >= 10");
    if (spec.a.rows() != spec.dim || spec.a.cols() != spec.dim || spec.b.rows() != spec.dim ||
        spec.b.cols() != spec.dim)
        throw ShapeError("sample_nongaussian: A and B must be d x d");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vector> samples;
    samples.reserve(spec.ensemble_size);
    Vector z(spec.dim), z2(spec.dim);
    for (int n = 0; n < spec.ensemble_size; ++n) {
        for (int i = 0; i < spec.dim; ++i) {
            z[i] = gauss(rng);
            z2[i] = std::copysign(z[i] * z[i], z[i]);
        }
        samples.push_back(spec.a * z + spec.b * z2);
    }
    return samples;
}

std::vector<PolySpec> random_poly_specs(std::uint64_t seed, int dim, const std::vector<int>& powers) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<PolySpec> specs;
    for (int n : powers) {
        PolySpec s;
        s.power = n;
        s.a = Vector(dim);
        s.b = Vector(dim);
        for (int i = 0; i < dim; ++i) s.a[i] = gauss(rng);
        for (int i = 0; i < dim; ++i) s.b[i] = gauss(rng);
        specs.push_back(std::move(s));
    }
    return specs;
}

std::function<Vector(const Vector&)> poly_f(const PolySpec& spec, double c) {
    if (spec.power < 2 || spec.power > 5) throw ParameterError("poly_f: power must be in {2,...,5}");
    const Vector a = spec.a;
    const Vector b = spec.b;
    const int n = spec.power;
    return [a, b, n, c](const Vector& x) {
        Vector xn = x;
        for (int i = 1; i < n; ++i) xn = xn.cwiseProduct(x);
        Vector y(1);
        y[0] = a.dot(x) + c * b.dot(xn);
        return y;
    };
}

McEstimate mc_oracle(const std::vector<Vector>& ensemble, const std::function<Vector(const Vector&)>& f) {
    if (ensemble.empty()) throw ParameterError("mc_oracle: empty ensemble");
    const std::size_t n = ensemble.size();
    std::vector<Vector> outputs;
    outputs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vector y = f(ensemble[i]);
        if (!y.allFinite())
            throw EvaluationError("mc_oracle: non-finite output at sample " + std::to_string(i),
                                  static_cast<long>(i));
        outputs.push_back(std::move(y));
    }
    McEstimate est;
    est.moments = empirical_moments(outputs);
    est.mean = est.moments.mean[0];
    est.variance = est.moments.cov.at(0, 0);

    // Standard errors: sd/sqrt(n) for the mean, sd of the squared centered
    // values for the variance estimate.
    double var_of_sq = 0.0;
    for (const Vector& y : outputs) {
        const double c2 = (y[0] - est.mean) * (y[0] - est.mean);
        var_of_sq += (c2 - est.variance) * (c2 - est.variance);
    }
    var_of_sq /= static_cast<double>(n);
    est.mean_se = std::sqrt(est.variance / static_cast<double>(n));
    est.var_se = std::sqrt(var_of_sq / static_cast<double>(n));
    return est;
}

std::vector<PolyStudyRow> polynomial_study(const NonGaussianSpec& ng, const std::vector<PolySpec>& polys,
                                           const std::vector<double>& c_sweep, double tau, double sut_beta) {
    const std::vector<Vector> ensemble = sample_nongaussian(ng);
    const MomentSet input = empirical_moments(ensemble);
    const HoutParams hp = hout_params(input, tau);
    const SigmaEnsemble hout_ens = hout(input, hp);
    const SigmaEnsemble sut_ens = sut(input.mean, input.cov.to_matrix(), sut_beta);

    std::vector<PolyStudyRow> rows;
    for (const PolySpec& poly : polys) {
        for (double c : c_sweep) {
            const auto f = poly_f(poly, c);
            const McEstimate truth = mc_oracle(ensemble, f);
            const PropagationResult hr = propagate(hout_ens, f);
            const PropagationResult sr = propagate(sut_ens, f);

            PolyStudyRow row;
            row.power = poly.power;
            row.c = c;
            row.hout_mean_err = std::abs(hr.moments.mean[0] - truth.mean);
            row.hout_var_err = std::abs(hr.moments.cov.at(0, 0) - truth.variance);
            row.sut_mean_err = std::abs(sr.moments.mean[0] - truth.mean);
            row.sut_var_err = std::abs(sr.moments.cov.at(0, 0) - truth.variance);
            row.mc_mean_se = truth.mean_se;
            row.mc_var_se = truth.var_se;
            rows.push_back(row);
        }
    }
    return rows;
}

namespace {

Vector lorenz_rhs(const Vector& s, const LorenzSpec& p) {
    Vector d(3);
    d[0] = p.sigma * (s[1] - s[0]);
    d[1] = s[0] * (p.rho - s[2]) - s[1];
    d[2] = s[0] * s[1] - p.beta * s[2];
    return d;
}

}  // namespace

Vector lorenz_rk4_step(const Vector& state, double dt, const LorenzSpec& spec) {
    const Vector k1 = lorenz_rhs(state, spec);
    const Vector k2 = lorenz_rhs(state + 0.5 * dt * k1, spec);
    const Vector k3 = lorenz_rhs(state + 0.5 * dt * k2, spec);
    const Vector k4 = lorenz_rhs(state + dt * k3, spec);
    return state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

struct MomentErrors {
    double mean, cov, skew, kurt;
};

MomentErrors moment_errors(const MomentSet& est, const MomentSet& truth) {
    MomentErrors e;
    e.mean = (est.mean - truth.mean).norm();
    e.cov = frobenius_norm(est.cov - truth.cov);
    e.skew = frobenius_norm(est.skew - truth.skew);
    e.kurt = frobenius_norm(est.kurt - truth.kurt);
    return e;
}

}  // namespace

SkillReport forecast_study(const LorenzSpec& spec, double tau) {
    if (spec.dt <= 0.0 || spec.trials < 1) throw ParameterError("forecast_study: invalid spec");
    const int n_steps = spec.forecast_steps + 1;

    // log-sum accumulators per step: [hout|sut] x [mean|cov|skew|kurt]
    std::vector<std::array<double, 8>> log_sums(n_steps, {0, 0, 0, 0, 0, 0, 0, 0});
    constexpr double geo_floor = 1e-16;

    SkillReport report;

    // Shared attractor approach from a fixed state, then a random further
    // stretch per trial.
    Vector base(3);
    base << 1.0, 1.0, 1.0;
    for (int i = 0; i < 1000; ++i) base = lorenz_rk4_step(base, spec.dt, spec);

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> extra_steps(1, 5000);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int trial = 0; trial < spec.trials; ++trial) {
        // Derived per-trial seed keeps trials independent and reorderable.
        std::mt19937_64 trial_rng(spec.seed ^ (0x9e3779b97f4a7c15ull * (trial + 1)));
        const int walk = extra_steps(rng);
        Vector center = base;
        for (int i = 0; i < walk; ++i) center = lorenz_rk4_step(center, spec.dt, spec);
        base = center;  // next trial walks on from here

        std::vector<Vector> ensemble(spec.ensemble_size);
        for (auto& x : ensemble) {
            x = center;
            for (int i = 0; i < 3; ++i) x[i] += spec.noise_scale * gauss(trial_rng);
        }
        for (int s = 0; s < spec.spinup_steps; ++s)
            for (auto& x : ensemble) x = lorenz_rk4_step(x, spec.dt, spec);

        const MomentSet initial = empirical_moments(ensemble);
        SigmaEnsemble hout_ens, sut_ens;
        try {
            hout_ens = hout(initial, tau);
            sut_ens = sut(initial.mean, initial.cov.to_matrix(), spec.sut_beta);
        } catch (const std::runtime_error&) {
            ++report.trials_skipped;
            continue;
        }

        for (int step = 0; step < n_steps; ++step) {
            if (step > 0) {
                for (auto& x : ensemble) x = lorenz_rk4_step(x, spec.dt, spec);
                for (auto& x : hout_ens.nodes) x = lorenz_rk4_step(x, spec.dt, spec);
                for (auto& x : sut_ens.nodes) x = lorenz_rk4_step(x, spec.dt, spec);
            }
            const MomentSet truth = empirical_moments(ensemble);
            const MomentErrors he = moment_errors(quadrature_moments(hout_ens), truth);
            const MomentErrors se = moment_errors(quadrature_moments(sut_ens), truth);
            auto& acc = log_sums[step];
            acc[0] += std::log(he.mean + geo_floor);
            acc[1] += std::log(he.cov + geo_floor);
            acc[2] += std::log(he.skew + geo_floor);
            acc[3] += std::log(he.kurt + geo_floor);
            acc[4] += std::log(se.mean + geo_floor);
            acc[5] += std::log(se.cov + geo_floor);
            acc[6] += std::log(se.skew + geo_floor);
            acc[7] += std::log(se.kurt + geo_floor);
        }
        ++report.trials_used;
    }

    if (report.trials_used == 0) throw ParameterError("forecast_study: all trials failed");
    const double inv = 1.0 / report.trials_used;
    for (int step = 0; step < n_steps; ++step) {
        const auto& acc = log_sums[step];
        SkillReport::Row row;
        row.hout_mean = std::exp(acc[0] * inv);
        row.hout_cov = std::exp(acc[1] * inv);
        row.hout_skew = std::exp(acc[2] * inv);
        row.hout_kurt = std::exp(acc[3] * inv);
        row.sut_mean = std::exp(acc[4] * inv);
        row.sut_cov = std::exp(acc[5] * inv);
        row.sut_skew = std::exp(acc[6] * inv);
        row.sut_kurt = std::exp(acc[7] * inv);
        report.steps.push_back(row);
    }
    return report;
}

}  // namespace hout
