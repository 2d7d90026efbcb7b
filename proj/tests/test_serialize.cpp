#include "hout/serialize.hpp"

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace hout;
using namespace hout::testing;

TEST_CASE("tensor JSON round trip") {
    auto rng = make_rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const int d = 1 + static_cast<int>(rng() % 4);
        const SymTensor t = random_symmetric_tensor(rng, k, d);
        const SymTensor back = tensor_from_json(tensor_to_json(t));
        CHECK(back.order() == k);
        CHECK(back.dim() == d);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == back[i]);
    }
}

TEST_CASE("moments JSON round trip and shape validation") {
    auto rng = make_rng(79);
    std::vector<Vector> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_vector(rng, 2));
    const MomentSet m = empirical_moments(pts);
    const MomentSet back = moments_from_json(moments_to_json(m));
    CHECK((back.mean - m.mean).norm() == 0.0);
    CHECK(frobenius_norm(back.kurt - m.kurt) == 0.0);

    Json bad = moments_to_json(m);
    bad["S"] = tensor_to_json(SymTensor(3, 3));
    CHECK_THROWS_AS(moments_from_json(bad), ShapeError);
}

TEST_CASE("ensemble CSV carries a header and one row per node") {
    const MomentSet m = [] {
        MomentSet ms;
        ms.mean = Vector::Zero(2);
        ms.cov = SymTensor::from_matrix(Matrix::Identity(2, 2));
        ms.skew = SymTensor(3, 2);
        ms.kurt = SymTensor(4, 2);
        return ms;
    }();
    const SigmaEnsemble e = sut(m.mean, m.cov.to_matrix(), 1.5);
    const std::string csv = ensemble_to_csv(e);
    CHECK(csv.substr(0, csv.find('\n')) == "index,weight,x_1,x_2");
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(e.nodes.size()) + 1);
}

TEST_CASE("format_number survives a parse round trip") {
    auto rng = make_rng(83);
    for (int trial = 0; trial < 100; ++trial) {
        const double x = random_vector(rng, 1, 1000.0)[0];
        CHECK(std::stod(format_number(x)) == x);
    }
}

TEST_CASE("decomposition JSON fields") {
    Vector v(2);
    v << 1.0, 2.0;
    const Rank1Decomposition dec = approx_rank1_decompose(tensor_power(v, 3));
    const Json j = decomposition_to_json(dec);
    CHECK(j.at("order") == 3);
    CHECK(j.at("signs").size() == dec.terms.size());
    CHECK(j.at("vectors").size() == dec.terms.size());
    CHECK(j.at("rate_bound").get<double>() == dec.rate_bound);

    const std::string csv = decomposition_residuals_csv(dec);
    CHECK(csv.rfind("iteration,norm,ratio\n", 0) == 0);
}
