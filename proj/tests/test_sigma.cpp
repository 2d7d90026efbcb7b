#include "hout/sigma.hpp"

#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace hout;
using namespace hout::testing;

namespace {

// Discrete test distribution: random points with uniform weights, so exact
// expectations are finite sums.
std::vector<Vector> random_points(std::mt19937_64& rng, int d, int n) {
    std::vector<Vector> pts;
    for (int i = 0; i < n; ++i) pts.push_back(random_vector(rng, d));
    return pts;
}

double monomial(const Vector& x, const std::vector<int>& exponents) {
    double p = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        for (int e = 0; e < exponents[i]; ++e) p *= x[static_cast<int>(i)];
    return p;
}

// All exponent tuples with total degree in [1, max_degree].
std::vector<std::vector<int>> monomials_up_to(int d, int max_degree) {
    std::vector<std::vector<int>> result;
    std::vector<int> cur(d, 0);
    std::function<void(int, int)> rec = [&](int slot, int budget) {
        if (slot == d) {
            result.push_back(cur);
            return;
        }
        for (int e = 0; e <= budget; ++e) {
            cur[slot] = e;
            rec(slot + 1, budget - e);
        }
        cur[slot] = 0;
    };
    rec(0, max_degree);
    std::erase_if(result, [](const std::vector<int>& ex) {
        int total = 0;
        for (int e : ex) total += e;
        return total == 0;
    });
    return result;
}

double quadrature_expectation(const SigmaEnsemble& e, const std::vector<int>& exponents) {
    double acc = 0.0;
    for (std::size_t i = 0; i < e.nodes.size(); ++i) acc += e.weights[i] * monomial(e.nodes[i], exponents);
    return acc;
}

double discrete_expectation(const std::vector<Vector>& pts, const std::vector<int>& exponents) {
    double acc = 0.0;
    for (const auto& p : pts) acc += monomial(p, exponents);
    return acc / static_cast<double>(pts.size());
}

}  // namespace

TEST_CASE("empirical_moments basics and degenerate support") {
    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << -1.0, 0.0;
    const MomentSet m = empirical_moments({a, b});
    CHECK(m.mean.norm() == 0.0);
    CHECK(m.cov.at(0, 0) == doctest::Approx(1.0));
    CHECK(m.cov.at(1, 1) == doctest::Approx(0.0));
    // Rank-deficient covariance fails the downstream PD check.
    CHECK_THROWS_AS(sqrt_spd(m.cov.to_matrix()), NotPositiveDefiniteError);
}

TEST_CASE("empirical_moments of {-1,0,1} in one dimension") {
    Vector a(1), b(1), c(1);
    a << -1.0;
    b << 0.0;
    c << 1.0;
    const MomentSet m = empirical_moments({a, b, c});
    CHECK(m.mean[0] == doctest::Approx(0.0));
    CHECK(m.cov.at(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(m.skew.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(m.kurt.at(0, 0, 0, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("empirical_moments of a point mass") {
    Vector x(2);
    x << 3.0, -4.0;
    const MomentSet m = empirical_moments(std::vector<Vector>(10, x));
    CHECK((m.mean - x).norm() <= 1e-14 * x.norm());
    CHECK(frobenius_norm(m.cov) <= 1e-28);
    CHECK(frobenius_norm(m.skew) <= 1e-42);
    CHECK(frobenius_norm(m.kurt) <= 1e-56);
}

TEST_CASE("empirical_moments input validation") {
    CHECK_THROWS_AS(empirical_moments({}), ParameterError);
    Vector x(1);
    x << 1.0;
    CHECK_THROWS_AS(empirical_moments({x}), ParameterError);
    Vector bad(1);
    bad << std::nan("");
    CHECK_THROWS_AS(empirical_moments({x, bad}), ParameterError);
    std::vector<double> w{0.7, 0.7};
    CHECK_THROWS_AS(empirical_moments({x, x}, &w), ParameterError);
}

TEST_CASE("sqrt_spd on diagonal and random SPD matrices") {
    CHECK((sqrt_spd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-12);

    Matrix d2 = Matrix::Zero(2, 2);
    d2(0, 0) = 4.0;
    d2(1, 1) = 9.0;
    const Matrix r = sqrt_spd(d2);
    CHECK(r(0, 0) == doctest::Approx(2.0));
    CHECK(r(1, 1) == doctest::Approx(3.0));

    auto rng = make_rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 4);
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = random_vector(rng, 1)[0];
        const Matrix a = g * g.transpose() + 0.1 * Matrix::Identity(d, d);
        const Matrix root = sqrt_spd(a);
        // Reconstruction oracle: sum of outer products of the columns.
        Matrix rec = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) rec += root.col(i) * root.col(i).transpose();
        CHECK((rec - a).norm() <= 1e-10 * a.norm());
    }
}

TEST_CASE("SUT in one dimension") {
    Vector mu = Vector::Zero(1);
    const Matrix c = Matrix::Identity(1, 1);

    const SigmaEnsemble e = sut(mu, c, 1.0);
    REQUIRE(e.nodes.size() == 3);
    CHECK(e.nodes[0][0] == 0.0);
    CHECK(e.nodes[1][0] == doctest::Approx(1.0));
    CHECK(e.nodes[2][0] == doctest::Approx(-1.0));
    CHECK(e.weights[0] == doctest::Approx(0.0));
    CHECK(e.weights[1] == doctest::Approx(0.5));
    CHECK(e.weights[2] == doctest::Approx(0.5));

    // beta = sqrt(3) on standard-normal moments: E[x^4] = 3.
    const SigmaEnsemble g = sut(mu, c, std::sqrt(3.0));
    double x4 = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) x4 += g.weights[i] * std::pow(g.nodes[i][0], 4);
    CHECK(x4 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("SUT reproduces mean and covariance") {
    auto rng = make_rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const Vector mu = random_vector(rng, d, 2.0);
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = random_vector(rng, 1)[0];
        const Matrix c = g * g.transpose() + 0.05 * Matrix::Identity(d, d);
        const double beta = 0.5 + 2.0 * static_cast<double>(rng() % 100) / 100.0;

        const SigmaEnsemble e = sut(mu, c, beta);
        double wsum = 0.0;
        for (double w : e.weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));

        const MomentSet q = quadrature_moments(e);
        CHECK((q.mean - mu).norm() <= 1e-10 * (1.0 + mu.norm()));
        CHECK((q.cov.to_matrix() - c).norm() <= 1e-10 * c.norm());
    }
}

TEST_CASE("sut_condition") {
    CHECK(sut_condition(std::sqrt(2.0), 2) == doctest::Approx(1.0));
    CHECK(sut_condition(1.0, 2) == doctest::Approx(3.0));
    CHECK(sut_condition(10.0, 1) == doctest::Approx(1.0));
}

TEST_CASE("hout_params hand-worked one-dimensional case") {
    MomentSet m;
    m.mean = Vector::Zero(1);
    m.cov = SymTensor(2, 1, {1.0});
    m.skew = SymTensor(3, 1, {2.0});
    m.kurt = SymTensor(4, 1, {9.0});

    const HoutParams p = hout_params(m, 1e-3);
    REQUIRE(p.skew_terms == 1);
    CHECK(p.skew_vectors[0][0] == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-9));
    REQUIRE(p.kurt_terms == 1);
    CHECK(p.kurt_pairs[0].sign == 1);
    CHECK(std::abs(p.kurt_pairs[0].vector[0]) == doctest::Approx(std::pow(9.0, 0.25)).epsilon(1e-9));
    // Induced covariance is 3; delta stays just above sqrt(3) since any
    // halving would make the adjusted covariance indefinite.
    CHECK(p.delta == doctest::Approx(std::sqrt(3.0) * (1.0 + 1e-6)).epsilon(1e-9));
    CHECK(p.adjusted_cov(0, 0) > 0.0);
}

TEST_CASE("zero skewness gives no skew nodes") {
    MomentSet m;
    m.mean = Vector::Zero(2);
    m.cov = SymTensor::from_matrix(Matrix::Identity(2, 2));
    m.skew = SymTensor(3, 2);
    Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
    e1[0] = 1.0;
    e2[1] = 1.0;
    m.kurt = 3.0 * tensor_power(e1, 4) + 3.0 * tensor_power(e2, 4);

    const HoutParams p = hout_params(m, 1e-4);
    CHECK(p.skew_terms == 0);
    CHECK(p.skew_vector_sum.norm() == 0.0);
    CHECK(p.gamma == 1.0);
    const SigmaEnsemble e = hout::hout(m, p);
    CHECK(e.nodes.size() == 2 * (2 + 0 + p.kurt_terms) + 3);
}

TEST_CASE("corollary bounds hold strictly") {
    auto rng = make_rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        std::vector<Vector> pts = random_points(rng, d, 40);
        const MomentSet m = empirical_moments(pts);
        const double tau = 1e-4;
        const HoutParams p = hout_params(m, tau);
        CHECK(p.beta < std::sqrt(tau / (2.0 * p.quartic_norm)));
        const double offset3 = std::pow(p.mean_offset.norm(), 3);
        if (offset3 > 0.0) CHECK(p.alpha < std::sqrt(tau / (2.0 * offset3)));
    }
}

TEST_CASE("HOUT matches the first two moments and bounds the next two") {
    auto rng = make_rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        std::vector<Vector> pts = random_points(rng, d, 50);
        const MomentSet m = empirical_moments(pts);
        const double tau = 1e-5;
        const HoutParams p = hout_params(m, tau);
        const SigmaEnsemble e = hout::hout(m, p);
        CHECK(e.nodes.size() == static_cast<std::size_t>(2 * (d + p.skew_terms + p.kurt_terms) + 3));

        // The weights are O(1/beta^2) ~ O(1/tau) with cancellation, so the
        // achievable accuracy scales with the condition number sum |w_i|.
        double wsum = 0.0, wabs = 0.0;
        for (double w : e.weights) {
            wsum += w;
            wabs += std::abs(w);
        }
        CHECK(std::abs(wsum - 1.0) <= 1e-14 * wabs);

        const MomentSet q = quadrature_moments(e);
        CHECK((q.mean - m.mean).norm() <= 1e-14 * wabs * (1.0 + m.mean.norm()));
        CHECK(frobenius_norm(q.cov - m.cov) <= 1e-14 * wabs * frobenius_norm(m.cov));
        CHECK(frobenius_norm(q.skew - m.skew) < tau);
        CHECK(frobenius_norm(q.kurt - m.kurt) < tau);

        // Split bounds: tau/2 plus the alpha/beta interaction terms.
        const double offset3 = std::pow(p.mean_offset.norm(), 3);
        CHECK(frobenius_norm(q.skew - m.skew) <= tau / 2.0 + p.alpha * p.alpha * offset3 + 1e-12);
        CHECK(frobenius_norm(q.kurt - m.kurt) <= tau / 2.0 + p.beta * p.beta * p.quartic_norm + 1e-12);
    }
}

TEST_CASE("degree of exactness: SUT at 2, HOUT at 4") {
    auto rng = make_rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        std::vector<Vector> pts = random_points(rng, d, 60);
        const MomentSet m = empirical_moments(pts);
        const double tau = 1e-6;
        const SigmaEnsemble se = sut(m.mean, m.cov.to_matrix(), 1.3);
        const SigmaEnsemble he = hout::hout(m, tau);
        const double mu_scale = 1.0 + m.mean.cwiseAbs().maxCoeff();
        const double poly_scale = 16.0 * std::pow(mu_scale, 4);

        for (const auto& ex : monomials_up_to(d, 4)) {
            int degree = 0;
            for (int e : ex) degree += e;
            const double truth = discrete_expectation(pts, ex);
            const double hq = quadrature_expectation(he, ex);
            if (degree <= 2) {
                const double sq = quadrature_expectation(se, ex);
                CHECK(std::abs(sq - truth) <= 1e-9 * (1.0 + std::abs(truth)));
                CHECK(std::abs(hq - truth) <= 1e-10 * poly_scale * (1.0 + std::abs(truth)));
            } else {
                CHECK(std::abs(hq - truth) <= tau * poly_scale);
            }
        }
    }
}

TEST_CASE("hout_condition structure") {
    // J = L = 0 with centred mean: condition reduces to the SUT bound plus
    // the canceling pair's 1/alpha.
    MomentSet m;
    m.mean = Vector::Zero(2);
    m.cov = SymTensor::from_matrix(Matrix::Identity(2, 2));
    m.skew = SymTensor(3, 2);
    m.kurt = SymTensor(4, 2);
    const HoutParams p = hout_params(m, 1e-4);
    CHECK(p.skew_terms == 0);
    CHECK(p.kurt_terms == 0);
    const double expected_sut_part = std::abs(p.center_weight) + 2.0 / (p.beta * p.beta);
    CHECK(hout_condition(p) == doctest::Approx(expected_sut_part + 1.0 / p.alpha).epsilon(1e-12));
    CHECK(hout_condition(p) >= 1.0);

    // Shrinking tau by 10x worsens conditioning.
    MomentSet m1;
    m1.mean = Vector::Zero(1);
    m1.cov = SymTensor(2, 1, {1.0});
    m1.skew = SymTensor(3, 1, {2.0});
    m1.kurt = SymTensor(4, 1, {9.0});
    const double c_loose = hout_condition(hout_params(m1, 1e-3));
    const double c_tight = hout_condition(hout_params(m1, 1e-4));
    CHECK(c_loose >= 1.0);
    CHECK(c_tight > c_loose);
}

TEST_CASE("propagate: identity, affine maps and failure reporting") {
    auto rng = make_rng(67);
    const int d = 2;
    std::vector<Vector> pts = random_points(rng, d, 40);
    const MomentSet m = empirical_moments(pts);
    const SigmaEnsemble e = hout::hout(m, 1e-5);

    const PropagationResult ident = propagate(e, [](const Vector& x) { return x; });
    CHECK((ident.moments.mean - m.mean).norm() <= 1e-10 * (1.0 + m.mean.norm()));
    CHECK(frobenius_norm(ident.moments.cov - m.cov) <= 1e-10 * frobenius_norm(m.cov));

    Matrix a(2, 2);
    a << 1.0, 2.0, -0.5, 0.25;
    Vector b(2);
    b << 3.0, -1.0;
    const PropagationResult aff = propagate(e, [&](const Vector& x) { return Vector(a * x + b); });
    CHECK((aff.moments.mean - (a * m.mean + b)).norm() <= 1e-10 * (1.0 + b.norm()));
    const Matrix expected_cov = a * m.cov.to_matrix() * a.transpose();
    CHECK((aff.moments.cov.to_matrix() - expected_cov).norm() <= 1e-10 * (1.0 + expected_cov.norm()));

    try {
        propagate(e, [](const Vector& x) {
            Vector y = x;
            y[0] = std::nan("");
            return y;
        });
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& err) {
        CHECK(err.node_index == 0);
    }
}
