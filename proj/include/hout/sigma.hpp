#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hout/decomp.hpp"
#include "hout/tensor.hpp"

namespace hout {

// First four (central) moments of one distribution.  Plain data: positive
// definiteness of the covariance is checked where it is needed (sqrt_spd),
// not at construction, so degenerate and formal weighted moments can be
// represented.
struct MomentSet {
    Vector mean;
    SymTensor cov{2, 1};
    SymTensor skew{3, 1};
    SymTensor kurt{4, 1};

    int dim() const { return static_cast<int>(mean.size()); }
};

struct SigmaEnsemble {
    std::vector<Vector> nodes;
    std::vector<double> weights;
    std::string generator;  // "SUT" or "HOUT"
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0, tau = 0.0;
};

// Everything Algorithm-3 style parameter selection derives from a MomentSet.
struct HoutParams {
    double tau = 0.0;
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
    int skew_terms = 0;                  // J
    int kurt_terms = 0;                  // L
    double sign_sum = 0.0;               // sum of kurtosis-term signs
    std::vector<Vector> skew_vectors;    // scaled rank-1 vectors of the skewness
    std::vector<Rank1Term> kurt_pairs;   // signed scaled rank-1 vectors of the kurtosis
    Vector skew_vector_sum;              // sum of skew vectors
    Vector mean_offset;                  // direction of the two mean-balancing nodes
    Matrix adjusted_cov;                 // covariance minus the kurtosis-induced part
    Matrix adjusted_cov_sqrt;            // symmetric square root of adjusted_cov
    double quartic_norm = 0.0;           // Frobenius norm of sum_i sqrt-col^{(x)4}
    double center_weight = 0.0;
};

struct PropagationResult {
    std::vector<Vector> outputs;  // f at every node, in node order
    MomentSet moments;            // formal weighted central moments of the outputs
};

double default_pd_tol(const Matrix& a);

MomentSet empirical_moments(const std::vector<Vector>& samples,
                            const std::vector<double>* weights = nullptr);

// Unique symmetric positive definite square root, via eigendecomposition.
Matrix sqrt_spd(const Matrix& a, double pd_tol = -1.0);

SigmaEnsemble sut(const Vector& mu, const Matrix& cov, double beta);
double sut_condition(double beta, int d);

HoutParams hout_params(const MomentSet& m, double tau,
                       std::optional<double> gamma_override = std::nullopt,
                       const DecompOptions& decomp_opts = {});
SigmaEnsemble hout(const MomentSet& m, const HoutParams& p);
SigmaEnsemble hout(const MomentSet& m, double tau);  // convenience: default params

double hout_condition(const HoutParams& p);

PropagationResult propagate(const SigmaEnsemble& ensemble,
                            const std::function<Vector(const Vector&)>& f);

// Quadrature moments of an ensemble itself (f = identity); used to check the
// moment-matching contracts.
MomentSet quadrature_moments(const SigmaEnsemble& ensemble);

}  // namespace hout
