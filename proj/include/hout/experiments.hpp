#pragma once

#include <cstdint>
#include <vector>

#include "hout/sigma.hpp"

namespace hout {

// Non-Gaussian test distribution: X = A Z + B (Z (.) Z (.) sign(Z)) with Z
// standard normal, i.e. the second term is componentwise sign(z) * z^2.
struct NonGaussianSpec {
    int dim = 2;
    Matrix a;
    Matrix b;
    int ensemble_size = 100000;
    std::uint64_t seed = 0;

    // A and B drawn with i.i.d. standard normal entries.
    static NonGaussianSpec random(int dim, int ensemble_size, std::uint64_t seed);
};

// f(x) = a.x + c * b.(x^n) with the power taken componentwise.
struct PolySpec {
    Vector a;
    Vector b;
    int power = 2;  // n in {2,...,5}
};

struct LorenzSpec {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double dt = 0.1;
    int spinup_steps = 5;       // N1
    int forecast_steps = 15;    // N2
    int trials = 50;
    double noise_scale = 0.01;
    int ensemble_size = 20000;
    double sut_beta = std::sqrt(3.0);
    std::uint64_t seed = 0;
};

// Geometric-mean absolute moment errors per forecast step, one row per step
// (index 0 is the initial time).
struct SkillReport {
    struct Row {
        double hout_mean, hout_cov, hout_skew, hout_kurt;
        double sut_mean, sut_cov, sut_skew, sut_kurt;
    };
    std::vector<Row> steps;
    int trials_used = 0;
    int trials_skipped = 0;  // decomposition failures
};

struct PolyStudyRow {
    int power = 0;
    double c = 0.0;
    double hout_mean_err = 0.0, hout_var_err = 0.0;
    double sut_mean_err = 0.0, sut_var_err = 0.0;
    double mc_mean_se = 0.0, mc_var_se = 0.0;  // Monte Carlo standard errors of the oracle
};

std::vector<Vector> sample_nongaussian(const NonGaussianSpec& spec);

// One PolySpec per requested power, coefficient vectors drawn i.i.d. standard
// normal from the seed.
std::vector<PolySpec> random_poly_specs(std::uint64_t seed, int dim, const std::vector<int>& powers);

std::function<Vector(const Vector&)> poly_f(const PolySpec& spec, double c);

struct McEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double var_se = 0.0;
    MomentSet moments;
};

// Uniform-weight ground truth statistics of f over a large ensemble.
McEstimate mc_oracle(const std::vector<Vector>& ensemble, const std::function<Vector(const Vector&)>& f);

std::vector<PolyStudyRow> polynomial_study(const NonGaussianSpec& ng, const std::vector<PolySpec>& polys,
                                           const std::vector<double>& c_sweep, double tau,
                                           double sut_beta = std::sqrt(2.0));

Vector lorenz_rk4_step(const Vector& state, double dt, const LorenzSpec& spec = {});

SkillReport forecast_study(const LorenzSpec& spec, double tau);

}  // namespace hout
