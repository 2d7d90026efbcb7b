#include "hout/sigma.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hout {

double default_pd_tol(const Matrix& a) {
    return 1e-10 * a.trace() / static_cast<double>(a.rows());
}

namespace {

// Neumaier compensated accumulator.  Quadrature weights scale like 1/beta^2 =
// O(1/tau) and cancel against each other, so plain summation loses enough
// precision to push the matched moments outside tolerance.
struct Compensated {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Weighted central moments of a node set.  Weights may be negative (formal
// quadrature sums); results are symmetrized.
MomentSet weighted_moments(const std::vector<Vector>& xs, const std::vector<double>& ws) {
    const int d = static_cast<int>(xs.front().size());
    std::vector<Compensated> mean_acc(d);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (int j = 0; j < d; ++j) mean_acc[j].add(ws[i] * xs[i][j]);
    Vector mu(d);
    for (int j = 0; j < d; ++j) mu[j] = mean_acc[j].value();

    MomentSet m;
    m.mean = mu;
    m.cov = SymTensor(2, d);
    m.skew = SymTensor(3, d);
    m.kurt = SymTensor(4, d);
    std::vector<Compensated> cov_acc(m.cov.size()), skew_acc(m.skew.size()), kurt_acc(m.kurt.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Vector c = xs[i] - mu;
        const SymTensor c2 = tensor_power(c, 2);
        const SymTensor c3 = tensor_power(c, 3);
        const SymTensor c4 = tensor_power(c, 4);
        for (std::size_t j = 0; j < c2.size(); ++j) cov_acc[j].add(ws[i] * c2[j]);
        for (std::size_t j = 0; j < c3.size(); ++j) skew_acc[j].add(ws[i] * c3[j]);
        for (std::size_t j = 0; j < c4.size(); ++j) kurt_acc[j].add(ws[i] * c4[j]);
    }
    for (std::size_t j = 0; j < cov_acc.size(); ++j) m.cov[j] = cov_acc[j].value();
    for (std::size_t j = 0; j < skew_acc.size(); ++j) m.skew[j] = skew_acc[j].value();
    for (std::size_t j = 0; j < kurt_acc.size(); ++j) m.kurt[j] = kurt_acc[j].value();
    m.cov = symmetrize(m.cov);
    m.skew = symmetrize(m.skew);
    m.kurt = symmetrize(m.kurt);
    return m;
}

}  // namespace

MomentSet empirical_moments(const std::vector<Vector>& samples, const std::vector<double>* weights) {
    if (samples.size() < 2) throw ParameterError("empirical_moments: need at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!samples[i].allFinite())
            throw ParameterError("empirical_moments: non-finite sample at index " + std::to_string(i));

    std::vector<double> ws;
    if (weights) {
        if (weights->size() != samples.size()) throw ShapeError("empirical_moments: weight count mismatch");
        double sum = 0.0;
        for (double w : *weights) sum += w;
        if (std::abs(sum - 1.0) > 1e-9) throw ParameterError("empirical_moments: weights must sum to 1");
        ws = *weights;
    } else {
        ws.assign(samples.size(), 1.0 / static_cast<double>(samples.size()));
    }
    return weighted_moments(samples, ws);
}

Matrix sqrt_spd(const Matrix& a, double pd_tol) {
    if (a.rows() != a.cols()) throw ShapeError("sqrt_spd: matrix must be square");
    if (pd_tol < 0.0) pd_tol = default_pd_tol(a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.eigenvalues().minCoeff() <= pd_tol)
        throw NotPositiveDefiniteError("sqrt_spd: matrix is not positive definite (min eigenvalue " +
                                       std::to_string(es.eigenvalues().minCoeff()) + ")");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

SigmaEnsemble sut(const Vector& mu, const Matrix& cov, double beta) {
    if (beta <= 0.0) throw ParameterError("sut: beta must be positive");
    const int d = static_cast<int>(mu.size());
    const Matrix root = sqrt_spd(cov);

    SigmaEnsemble e;
    e.generator = "SUT";
    e.beta = beta;
    e.nodes.reserve(2 * d + 1);
    e.weights.reserve(2 * d + 1);
    e.nodes.push_back(mu);
    e.weights.push_back(1.0 - d / (beta * beta));
    for (int i = 0; i < d; ++i) {
        e.nodes.push_back(mu + beta * root.col(i));
        e.weights.push_back(0.5 / (beta * beta));
    }
    for (int i = 0; i < d; ++i) {
        e.nodes.push_back(mu - beta * root.col(i));
        e.weights.push_back(0.5 / (beta * beta));
    }
    return e;
}

double sut_condition(double beta, int d) {
    if (beta <= 0.0) throw ParameterError("sut_condition: beta must be positive");
    return beta >= std::sqrt(static_cast<double>(d)) ? 1.0 : 2.0 * d / (beta * beta) - 1.0;
}

HoutParams hout_params(const MomentSet& m, double tau, std::optional<double> gamma_override,
                       const DecompOptions& decomp_opts) {
    if (tau <= 0.0) throw ParameterError("hout_params: tau must be positive");
    const int d = m.dim();

    DecompOptions opts = decomp_opts;
    opts.tau = tau / 2.0;

    HoutParams p;
    p.tau = tau;

    const Rank1Decomposition skew_dec = approx_rank1_decompose(m.skew, opts);
    for (const auto& term : skew_dec.terms) p.skew_vectors.push_back(term.vector);
    p.skew_terms = static_cast<int>(p.skew_vectors.size());

    const Rank1Decomposition kurt_dec = approx_rank1_decompose(m.kurt, opts);
    p.kurt_pairs = kurt_dec.terms;
    p.kurt_terms = static_cast<int>(p.kurt_pairs.size());
    p.sign_sum = 0.0;
    for (const auto& term : p.kurt_pairs) p.sign_sum += term.sign;

    const Matrix cov = m.cov.to_matrix();
    Matrix induced = Matrix::Zero(d, d);  // sum_i s_i u_i u_i^T
    for (const auto& term : p.kurt_pairs) induced += term.sign * (term.vector * term.vector.transpose());

    // Delta keeps cov - delta^{-2} * induced positive definite.
    const double pd_tol = default_pd_tol(cov);
    Eigen::SelfAdjointEigenSolver<Matrix> es_cov(cov);
    const double cov_min = es_cov.eigenvalues().minCoeff();
    if (cov_min <= pd_tol) throw NotPositiveDefiniteError("hout_params: covariance is not positive definite");
    Eigen::SelfAdjointEigenSolver<Matrix> es_ind(induced);
    const double induced_max = es_ind.eigenvalues().maxCoeff();

    constexpr double delta_margin = 1e-6;
    double delta = induced_max > 0.0 ? std::sqrt(induced_max / cov_min) * (1.0 + delta_margin) : 1.0;
    auto pd_with = [&](double dl) {
        Matrix cand = cov - induced / (dl * dl);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cand);
        return es.eigenvalues().minCoeff() > pd_tol;
    };
    if (!pd_with(delta))
        throw ParameterError("hout_params: adjusted covariance not positive definite at the initial delta");
    // The delta bound is conservative when cov is near rank-deficient; halve
    // while the adjusted covariance stays positive definite, reverting the
    // halving that breaks it.
    for (int i = 0; i < 60; ++i) {
        if (!pd_with(delta / 2.0)) break;
        delta /= 2.0;
    }
    p.delta = delta;
    p.adjusted_cov = cov - induced / (delta * delta);
    p.adjusted_cov_sqrt = sqrt_spd(p.adjusted_cov, pd_tol);

    SymTensor quartic(4, d);
    for (int i = 0; i < d; ++i) quartic += tensor_power(p.adjusted_cov_sqrt.col(i), 4);
    p.quartic_norm = frobenius_norm(quartic);

    constexpr double bound_frac = 0.99;  // strict inequalities: take 99% of each bound
    p.beta = bound_frac * std::sqrt(tau / (2.0 * p.quartic_norm));

    if (gamma_override) {
        if (*gamma_override <= 0.0) throw ParameterError("hout_params: gamma must be positive");
        p.gamma = *gamma_override;
    } else {
        p.gamma = p.skew_terms > 0 ? std::pow(static_cast<double>(p.skew_terms), -1.0 / 3.0) : 1.0;
    }

    p.skew_vector_sum = Vector::Zero(d);
    for (const auto& v : p.skew_vectors) p.skew_vector_sum += v;
    p.center_weight = 1.0 - d / (p.beta * p.beta) - p.sign_sum / std::pow(p.delta, 4);
    // The +/- alpha nodes must contribute exactly -gamma^{-2} mu-tilde to the
    // weighted mean to cancel the skew nodes' contribution; any mu component
    // here would break the mean identity.
    p.mean_offset = -p.skew_vector_sum / (p.gamma * p.gamma);

    const double offset_norm3 = std::pow(p.mean_offset.norm(), 3);  // ||mu_hat^{(x)3}||_F
    p.alpha = offset_norm3 > 0.0 ? bound_frac * std::sqrt(tau / (2.0 * offset_norm3)) : 1.0;
    return p;
}

SigmaEnsemble hout(const MomentSet& m, const HoutParams& p) {
    const int d = m.dim();
    const int J = p.skew_terms;
    const int L = p.kurt_terms;

    SigmaEnsemble e;
    e.generator = "HOUT";
    e.alpha = p.alpha;
    e.beta = p.beta;
    e.gamma = p.gamma;
    e.delta = p.delta;
    e.tau = p.tau;
    e.nodes.reserve(2 * (d + J + L) + 3);
    e.weights.reserve(2 * (d + J + L) + 3);

    e.nodes.push_back(m.mean);
    e.weights.push_back(p.center_weight);
    e.nodes.push_back(m.mean + p.alpha * p.mean_offset);
    e.weights.push_back(0.5 / p.alpha);
    e.nodes.push_back(m.mean - p.alpha * p.mean_offset);
    e.weights.push_back(-0.5 / p.alpha);
    for (int i = 0; i < d; ++i) {
        e.nodes.push_back(m.mean + p.beta * p.adjusted_cov_sqrt.col(i));
        e.weights.push_back(0.5 / (p.beta * p.beta));
    }
    for (int i = 0; i < d; ++i) {
        e.nodes.push_back(m.mean - p.beta * p.adjusted_cov_sqrt.col(i));
        e.weights.push_back(0.5 / (p.beta * p.beta));
    }
    const double w_skew = 0.5 / std::pow(p.gamma, 3);
    for (int i = 0; i < J; ++i) {
        e.nodes.push_back(m.mean + p.gamma * p.skew_vectors[i]);
        e.weights.push_back(w_skew);
    }
    for (int i = 0; i < J; ++i) {
        e.nodes.push_back(m.mean - p.gamma * p.skew_vectors[i]);
        e.weights.push_back(-w_skew);
    }
    const double w_kurt = 0.5 / std::pow(p.delta, 4);
    for (int i = 0; i < L; ++i) {
        e.nodes.push_back(m.mean + p.delta * p.kurt_pairs[i].vector);
        e.weights.push_back(w_kurt * p.kurt_pairs[i].sign);
    }
    for (int i = 0; i < L; ++i) {
        e.nodes.push_back(m.mean - p.delta * p.kurt_pairs[i].vector);
        e.weights.push_back(w_kurt * p.kurt_pairs[i].sign);
    }
    return e;
}

SigmaEnsemble hout(const MomentSet& m, double tau) {
    return hout(m, hout_params(m, tau));
}

double hout_condition(const HoutParams& p) {
    return std::abs(p.center_weight) + 1.0 / p.alpha + p.skew_terms / std::pow(p.gamma, 3) +
           static_cast<double>(p.mean_offset.size()) / (p.beta * p.beta) +
           p.kurt_terms / std::pow(p.delta, 4);
}

PropagationResult propagate(const SigmaEnsemble& ensemble, const std::function<Vector(const Vector&)>& f) {
    PropagationResult r;
    r.outputs.reserve(ensemble.nodes.size());
    for (std::size_t i = 0; i < ensemble.nodes.size(); ++i) {
        Vector y = f(ensemble.nodes[i]);
        if (!y.allFinite())
            throw EvaluationError("propagate: f returned a non-finite value at node " + std::to_string(i),
                                  static_cast<long>(i));
        r.outputs.push_back(std::move(y));
    }
    r.moments = weighted_moments(r.outputs, ensemble.weights);
    return r;
}

MomentSet quadrature_moments(const SigmaEnsemble& ensemble) {
    return weighted_moments(ensemble.nodes, ensemble.weights);
}

}  // namespace hout
