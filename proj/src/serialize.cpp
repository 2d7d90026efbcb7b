#include "hout/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace hout {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Json tensor_to_json(const SymTensor& t) {
    return Json{{"order", t.order()}, {"dim", t.dim()}, {"entries", t.entries()}};
}

SymTensor tensor_from_json(const Json& j) {
    return SymTensor(j.at("order").get<int>(), j.at("dim").get<int>(),
                     j.at("entries").get<std::vector<double>>());
}

namespace {

Json vector_to_json(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const Json& j) {
    const auto vals = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

Json moments_to_json(const MomentSet& m) {
    return Json{{"mu", vector_to_json(m.mean)},
                {"C", tensor_to_json(m.cov)},
                {"S", tensor_to_json(m.skew)},
                {"K", tensor_to_json(m.kurt)}};
}

MomentSet moments_from_json(const Json& j) {
    MomentSet m;
    m.mean = vector_from_json(j.at("mu"));
    m.cov = tensor_from_json(j.at("C"));
    m.skew = tensor_from_json(j.at("S"));
    m.kurt = tensor_from_json(j.at("K"));
    const int d = m.dim();
    if (m.cov.dim() != d || m.skew.dim() != d || m.kurt.dim() != d)
        throw ShapeError("moments_from_json: inconsistent dimensions");
    if (m.cov.order() != 2 || m.skew.order() != 3 || m.kurt.order() != 4)
        throw ShapeError("moments_from_json: C, S, K must have orders 2, 3, 4");
    return m;
}

Json decomposition_to_json(const Rank1Decomposition& d) {
    Json signs = Json::array();
    Json vectors = Json::array();
    for (const auto& term : d.terms) {
        signs.push_back(term.sign);
        vectors.push_back(vector_to_json(term.vector));
    }
    return Json{{"order", d.order},
                {"signs", signs},
                {"vectors", vectors},
                {"residual_norms", d.residual_norms},
                {"rate_bound", d.rate_bound}};
}

std::string decomposition_residuals_csv(const Rank1Decomposition& d) {
    std::ostringstream out;
    out << "iteration,norm,ratio\n";
    for (std::size_t i = 0; i < d.residual_norms.size(); ++i) {
        out << i << ',' << format_number(d.residual_norms[i]) << ',';
        if (i > 0 && d.residual_norms[i - 1] > 0.0)
            out << format_number(d.residual_norms[i] / d.residual_norms[i - 1]);
        out << '\n';
    }
    return out.str();
}

Json ensemble_to_json(const SigmaEnsemble& e) {
    Json nodes = Json::array();
    for (const auto& n : e.nodes) nodes.push_back(vector_to_json(n));
    return Json{{"generator", e.generator},
                {"nodes", nodes},
                {"weights", e.weights},
                {"meta",
                 {{"alpha", e.alpha}, {"beta", e.beta}, {"gamma", e.gamma}, {"delta", e.delta}, {"tau", e.tau}}}};
}

std::string ensemble_to_csv(const SigmaEnsemble& e) {
    std::ostringstream out;
    const int d = e.nodes.empty() ? 0 : static_cast<int>(e.nodes.front().size());
    out << "index,weight";
    for (int i = 1; i <= d; ++i) out << ",x_" << i;
    out << '\n';
    for (std::size_t i = 0; i < e.nodes.size(); ++i) {
        out << i << ',' << format_number(e.weights[i]);
        for (int j = 0; j < d; ++j) out << ',' << format_number(e.nodes[i][j]);
        out << '\n';
    }
    return out.str();
}

std::string poly_study_csv(const std::vector<PolyStudyRow>& rows) {
    std::ostringstream out;
    out << "power,c,hout_mean_err,hout_var_err,sut_mean_err,sut_var_err,mc_mean_se,mc_var_se\n";
    for (const auto& r : rows) {
        out << r.power << ',' << format_number(r.c) << ',' << format_number(r.hout_mean_err) << ','
            << format_number(r.hout_var_err) << ',' << format_number(r.sut_mean_err) << ','
            << format_number(r.sut_var_err) << ',' << format_number(r.mc_mean_se) << ','
            << format_number(r.mc_var_se) << '\n';
    }
    return out.str();
}

std::string skill_report_csv(const SkillReport& r) {
    std::ostringstream out;
    out << "step,hout_mean,hout_cov,hout_skew,hout_kurt,sut_mean,sut_cov,sut_skew,sut_kurt\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        out << i << ',' << format_number(s.hout_mean) << ',' << format_number(s.hout_cov) << ','
            << format_number(s.hout_skew) << ',' << format_number(s.hout_kurt) << ','
            << format_number(s.sut_mean) << ',' << format_number(s.sut_cov) << ','
            << format_number(s.sut_skew) << ',' << format_number(s.sut_kurt) << '\n';
    }
    return out.str();
}

Json skill_report_to_json(const SkillReport& r) {
    Json steps = Json::array();
    for (const auto& s : r.steps)
        steps.push_back(Json{{"hout_mean", s.hout_mean},
                             {"hout_cov", s.hout_cov},
                             {"hout_skew", s.hout_skew},
                             {"hout_kurt", s.hout_kurt},
                             {"sut_mean", s.sut_mean},
                             {"sut_cov", s.sut_cov},
                             {"sut_skew", s.sut_skew},
                             {"sut_kurt", s.sut_kurt}});
    return Json{{"steps", steps}, {"trials_used", r.trials_used}, {"trials_skipped", r.trials_skipped}};
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json_file(const std::string& path) {
    return Json::parse(read_file(path));
}

void write_json_file(const std::string& path, const Json& j) {
    write_file(path, j.dump(2) + "\n");
}

}  // namespace hout
