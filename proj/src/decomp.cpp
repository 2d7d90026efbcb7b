#include "hout/decomp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace hout {

double BoundConstants::c(int order) {
    switch (order) {
        case 2: return 1.0;  // matrix case, Cauchy-Schwarz argument
        case 3: return 2.0 / (3.0 + 4.0 * std::sqrt(2.0) + std::sqrt(3.0));
        case 4: return 6.0 / 323.0;
        default: throw OrderError("entry-eigenvalue bound constants exist for orders 2..4");
    }
}

double rate_bound(int order, int dim) {
    const double c = BoundConstants::c(order);
    double dk = 1.0;
    for (int i = 0; i < order; ++i) dk *= dim;
    return std::sqrt(1.0 - c * c / dk);
}

namespace {

// Leading left singular vector of the d x d^{k-1} unfolding, via the d x d
// Gram matrix (d is small in all target uses).
Vector unfolding_init(const SymTensor& t) {
    const Matrix m = unfold(t);
    const Matrix gram = m * m.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    // Eigenvalues are ascending; leading singular vector is the last column.
    return es.eigenvectors().col(t.dim() - 1);
}

Vector contract_excluding(const SymTensor& t, const std::vector<Vector>& vs, int skip) {
    SymTensor cur = t;
    for (int m = 0; m < static_cast<int>(vs.size()); ++m) {
        if (m == skip) continue;
        cur = contract_trailing(cur, vs[m]);
    }
    return cur.to_vector();
}

// Fix the sign ambiguity of even-order eigenvectors: make the
// largest-magnitude component positive.
void canonicalize_sign(Vector& v) {
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
}

}  // namespace

EigenPair hopm_from(const SymTensor& t, const Vector& init, double eig_tol, int max_iters) {
    if (eig_tol <= 0.0) throw ParameterError("hopm: eig_tol must be positive");
    const int k = t.order();
    if (frobenius_norm(t) == 0.0) throw DegenerateInputError("hopm: zero tensor has no eigen-direction");

    std::vector<Vector> vs(static_cast<std::size_t>(k), init.normalized());
    double lambda = contract_all(t, vs[0]);
    EigenPair best;
    best.vector = vs[0];
    best.eigenvalue = lambda;

    for (int iter = 0; iter < max_iters; ++iter) {
        for (int slot = 0; slot < k; ++slot) {
            Vector w = contract_excluding(t, vs, slot);
            const double n = w.norm();
            if (n == 0.0) break;  // landed in the kernel; keep previous iterate
            vs[slot] = w / n;
        }
        const double lambda_prev = lambda;
        lambda = contract_all(t, vs[0]);
        best.vector = vs[0];
        best.eigenvalue = lambda;
        best.iterations = iter + 1;
        if (std::abs(lambda - lambda_prev) <= eig_tol) {
            // Lambda can plateau before the vector settles; require the
            // eigen-residual as well.
            const double resid = (contract_all_but_one(t, vs[0]) - lambda * vs[0]).norm();
            if (resid <= eig_tol * std::max(1.0, std::abs(lambda))) {
                best.converged = true;
                break;
            }
        }
    }
    if (k % 2 == 0) canonicalize_sign(best.vector);
    best.eigenvalue = contract_all(t, best.vector);
    return best;
}

EigenPair hopm(const SymTensor& t, double eig_tol, int max_iters) {
    return hopm_from(t, unfolding_init(t), eig_tol, max_iters);
}

std::pair<int, Vector> best_rank1(const SymTensor& t, double eig_tol, int max_iters) {
    const EigenPair p = hopm(t, eig_tol, max_iters);
    const int k = t.order();
    const double mag = std::pow(std::abs(p.eigenvalue), 1.0 / k);
    if (k % 2 == 1) {
        // Odd order absorbs the sign: (-v)^{(x)k} = -v^{(x)k}.
        const double s = p.eigenvalue < 0.0 ? -1.0 : 1.0;
        return {1, s * mag * p.vector};
    }
    return {p.eigenvalue < 0.0 ? -1 : 1, mag * p.vector};
}

Rank1Decomposition approx_rank1_decompose(const SymTensor& t, const DecompOptions& opts) {
    if (opts.tau <= 0.0) throw ParameterError("approx_rank1_decompose: tau must be positive");
    const int k = t.order();
    const int d = t.dim();

    Rank1Decomposition dec;
    dec.order = k;
    dec.rate_bound = rate_bound(k, d);
    dec.residual_norms.push_back(frobenius_norm(t));
    if (dec.residual_norms.back() <= opts.tau) return dec;

    std::size_t max_terms = opts.max_terms > 0 ? static_cast<std::size_t>(opts.max_terms) : 10 * t.size();
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SymTensor residual = t;
    int stall_count = 0;
    while (dec.residual_norms.back() > opts.tau) {
        if (dec.terms.size() >= max_terms)
            throw BudgetExceededError("approx_rank1_decompose: max_terms reached with residual above tau", dec);

        EigenPair p = hopm(residual, opts.eig_tol, opts.max_iters);
        const double cur_norm = dec.residual_norms.back();
        auto prospective = [&](double lambda) {
            return std::sqrt(std::max(0.0, cur_norm * cur_norm - lambda * lambda));
        };
        if (prospective(p.eigenvalue) >= (1.0 - 1e-14) * cur_norm) {
            // HOPM found a near-null eigenpair; retry from random unit
            // vectors and keep the largest |lambda|.
            for (int a = 0; a < opts.restart_attempts; ++a) {
                Vector v0(d);
                for (int i = 0; i < d; ++i) v0[i] = gauss(rng);
                if (v0.norm() == 0.0) continue;
                EigenPair q = hopm_from(residual, v0, opts.eig_tol, opts.max_iters);
                if (std::abs(q.eigenvalue) > std::abs(p.eigenvalue)) p = q;
            }
        }

        const int sign = (k % 2 == 1 || p.eigenvalue >= 0.0) ? 1 : -1;
        const double mag = std::pow(std::abs(p.eigenvalue), 1.0 / k);
        Vector scaled = mag * p.vector;
        if (k % 2 == 1 && p.eigenvalue < 0.0) scaled = -scaled;

        SymTensor next = residual;
        SymTensor term = tensor_power(scaled, k);
        if (sign > 0) next -= term; else next += term;
        const double next_norm = frobenius_norm(next);

        if (next_norm >= cur_norm || !std::isfinite(next_norm)) {
            if (++stall_count >= 3)
                throw StallError("approx_rank1_decompose: residual stalled (non-dominant eigenpair)", dec);
            continue;
        }
        stall_count = next_norm / cur_norm >= 1.0 - 1e-14 ? stall_count + 1 : 0;
        if (stall_count >= 3)
            throw StallError("approx_rank1_decompose: residual stalled (non-dominant eigenpair)", dec);

        residual = std::move(next);
        dec.terms.push_back({sign, std::move(scaled)});
        dec.residual_norms.push_back(next_norm);
    }
    return dec;
}

namespace {

// Local refinement of |T x v ... x v| on the unit sphere: hill climbing along
// the (projected) gradient direction with a shrinking step.
double refine_maxabs(const SymTensor& t, Vector v, double value) {
    const int k = t.order();
    double step = 0.1;
    for (int iter = 0; iter < 400 && step > 1e-14; ++iter) {
        const double c = contract_all(t, v);
        Vector grad = static_cast<double>(k) * contract_all_but_one(t, v);
        if (c < 0.0) grad = -grad;
        grad -= grad.dot(v) * v;  // tangent component
        const double gn = grad.norm();
        if (gn == 0.0) break;
        Vector cand = (v + step * grad / gn).normalized();
        const double cv = std::abs(contract_all(t, cand));
        if (cv > value) {
            value = cv;
            v = cand;
        } else {
            step *= 0.5;
        }
    }
    return value;
}

}  // namespace

EntryBoundCheck verify_entry_bound(const SymTensor& t, int grid_resolution) {
    const int d = t.dim();
    if (d > 3) throw ParameterError("verify_entry_bound: sphere search supports d <= 3");
    if (grid_resolution < 2) throw ParameterError("verify_entry_bound: grid_resolution must be >= 2");

    double best_val = -1.0;
    Vector best_v;
    auto consider = [&](const Vector& v) {
        const double val = std::abs(contract_all(t, v));
        if (val > best_val) {
            best_val = val;
            best_v = v;
        }
    };

    if (d == 1) {
        consider(Vector::Constant(1, 1.0));
    } else if (d == 2) {
        for (int i = 0; i < grid_resolution; ++i) {
            const double theta = M_PI * i / grid_resolution;  // antipodes give the same |value|
            Vector v(2);
            v << std::cos(theta), std::sin(theta);
            consider(v);
        }
    } else {
        for (int i = 0; i <= grid_resolution; ++i) {
            const double polar = M_PI * i / grid_resolution;
            for (int j = 0; j < 2 * grid_resolution; ++j) {
                const double azimuth = M_PI * j / grid_resolution;
                Vector v(3);
                v << std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar);
                consider(v);
            }
        }
    }

    EntryBoundCheck out;
    out.lambda_maxabs = refine_maxabs(t, best_v, best_val);
    out.max_entry = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) out.max_entry = std::max(out.max_entry, std::abs(t[i]));
    out.ratio = out.max_entry > 0.0 ? out.lambda_maxabs / out.max_entry : 1.0;
    return out;
}

}  // namespace hout
