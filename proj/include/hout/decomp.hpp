#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hout/tensor.hpp"

namespace hout {

struct EigenPair {
    Vector vector;      // unit norm
    double eigenvalue = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct Rank1Term {
    int sign = 1;   // always +1 for odd orders
    Vector vector;  // eigenvalue magnitude absorbed: term is sign * vector^{(x)k}
};

struct Rank1Decomposition {
    int order = 0;
    std::vector<Rank1Term> terms;
    std::vector<double> residual_norms;  // ||T_l||_F, starting at ||T_0||_F
    double rate_bound = 0.0;
};

// Lemma constants relating the dominant eigenvalue to the largest entry.
struct BoundConstants {
    static double c(int order);  // order 2 -> 1, 3 -> 2/(3+4*sqrt(2)+sqrt(3)), 4 -> 6/323
};

struct DecompOptions {
    double tau = 1e-10;
    double eig_tol = 1e-12;
    int max_iters = 500;
    int max_terms = 0;  // 0 means 10 * d^k
    int restart_attempts = 8;
    std::uint64_t seed = 0;
};

// Thrown when max_terms is hit with residual still above tau; carries the
// partial decomposition accumulated so far.
struct BudgetExceededError : std::runtime_error {
    BudgetExceededError(const std::string& msg, Rank1Decomposition p)
        : std::runtime_error(msg), partial(std::move(p)) {}
    Rank1Decomposition partial;
};

// Residual stopped decreasing: HOPM keeps landing on a non-dominant (or zero)
// eigenpair even after random restarts.
struct StallError : std::runtime_error {
    StallError(const std::string& msg, Rank1Decomposition p)
        : std::runtime_error(msg), partial(std::move(p)) {}
    Rank1Decomposition partial;
};

// Higher Order Power Method: dominant eigenpair of a symmetric tensor,
// initialized from the leading left singular vector of the unfolding.
EigenPair hopm(const SymTensor& t, double eig_tol = 1e-12, int max_iters = 500);

// HOPM started from a caller-supplied unit vector (used for restarts).
EigenPair hopm_from(const SymTensor& t, const Vector& init, double eig_tol = 1e-12, int max_iters = 500);

// One greedy step: eigenpair scaled so the term is sign * v^{(x)k}.
std::pair<int, Vector> best_rank1(const SymTensor& t, double eig_tol = 1e-12, int max_iters = 500);

// Repeated best-rank-1 subtraction until ||residual||_F <= tau.
Rank1Decomposition approx_rank1_decompose(const SymTensor& t, const DecompOptions& opts = {});

// Convergence-rate envelope r = sqrt(1 - c_k^2 / d^k).
double rate_bound(int order, int dim);

struct EntryBoundCheck {
    double lambda_maxabs = 0.0;  // sphere-search estimate of the dominant |eigenvalue|
    double max_entry = 0.0;
    double ratio = 0.0;          // lambda_maxabs / max_entry
};

// Sphere-grid search (d <= 3) with local refinement, estimating the largest
// |T x v ... x v| over unit vectors and comparing it to the largest entry.
EntryBoundCheck verify_entry_bound(const SymTensor& t, int grid_resolution = 720);

}  // namespace hout
