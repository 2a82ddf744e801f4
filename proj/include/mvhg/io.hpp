#ifndef MVHG_IO_HPP
#define MVHG_IO_HPP

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mvhg/densities.hpp"
#include "mvhg/matrixops.hpp"

namespace mvhg {

using nlohmann::json;

// Whitespace-delimited dense text, one matrix row per line.
inline Matrix read_matrix_text(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("read_matrix_text: no rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw ConfigError("read_matrix_text: ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

inline void write_matrix_text(const Matrix& m, std::ostream& os) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j);
        }
        os << '\n';
    }
}

// JSON array-of-rows form.
inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ConfigError("matrix_from_json: expected a non-empty array of rows");
    if (j[0].is_number()) {  // 1 x k row vector shorthand
        Matrix m(1, static_cast<Eigen::Index>(j.size()));
        for (std::size_t c = 0; c < j.size(); ++c)
            m(0, static_cast<Eigen::Index>(c)) = j[c].get<double>();
        return m;
    }
    const std::size_t rows = j.size(), cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError("matrix_from_json: ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j[r][c].get<double>();
    }
    return m;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

// Unknown keys in spec files are errors, not silent ignores.
inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double need_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError(where + ": missing required key '" + key + "'");
    if (!j.at(key).is_number())
        throw ConfigError(where + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline Matrix need_matrix(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError(where + ": missing required key '" + key + "'");
    return matrix_from_json(j.at(key));
}

inline TruncationPolicy truncation_from_json(const json& j, const std::string& where) {
    TruncationPolicy p;
    if (!j.is_object()) throw ConfigError(where + ": truncation must be an object");
    check_keys(j, {"max_degree", "tail_tol", "growth_guard", "table_ceiling",
                   "allow_asymptotic"},
               where + ".truncation");
    if (j.contains("max_degree")) p.max_degree = j.at("max_degree").get<int>();
    if (j.contains("tail_tol")) p.tail_tol = j.at("tail_tol").get<double>();
    if (j.contains("growth_guard")) p.growth_guard = j.at("growth_guard").get<double>();
    if (j.contains("table_ceiling")) p.table_ceiling = j.at("table_ceiling").get<int>();
    if (j.contains("allow_asymptotic"))
        p.allow_asymptotic = j.at("allow_asymptotic").get<bool>();
    p.validate();
    return p;
}

inline HypergeomSpec series_from_json(const json& j, const std::string& where) {
    HypergeomSpec s;
    if (!j.is_object()) throw ConfigError(where + ": series must be an object");
    check_keys(j, {"upper", "lower", "truncation"}, where + ".series");
    if (j.contains("upper")) s.upper = j.at("upper").get<std::vector<double>>();
    if (j.contains("lower")) s.lower = j.at("lower").get<std::vector<double>>();
    if (j.contains("truncation"))
        s.truncation = truncation_from_json(j.at("truncation"), where);
    return s;
}

inline EllipticalParams elliptical_from_json(const json& j, const std::string& where) {
    Matrix mu = need_matrix(j, "mu", where);
    SpdMatrix sigma(need_matrix(j, "sigma", where));
    SpdMatrix theta(need_matrix(j, "theta", where));
    return EllipticalParams(std::move(mu), std::move(sigma), std::move(theta));
}

inline GenHgForm form_from_json(const json& j, const std::string& where) {
    std::string f = j.at("form").get<std::string>();
    if (f == "gauss") return GenHgForm::gauss;
    if (f == "confluent") return GenHgForm::confluent;
    throw ConfigError(where + ": form must be 'gauss' or 'confluent'");
}

}  // namespace detail

// Family-tagged JSON form of DistributionSpec. Family tags:
//   matrix_normal, matricvariate_t, hg_gamma, hg_gamma_inv, hg_beta2,
//   hg_beta2_inv, gen_hg, gen_hg_inv, compound_thm1, compound_thm2,
//   compound_thm3, compound_thm4, scale_mixture_thm5
inline DistributionSpec distribution_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object() || !j.contains("family"))
        throw ConfigError("distribution spec: missing 'family'");
    const std::string family = j.at("family").get<std::string>();
    const std::string where = "distribution spec (" + family + ")";

    auto series_or_default = [&](const json& obj) {
        return obj.contains("series") ? series_from_json(obj.at("series"), where)
                                      : HypergeomSpec{};
    };
    auto truncation_or_default = [&](const json& obj) {
        return obj.contains("truncation")
                   ? truncation_from_json(obj.at("truncation"), where)
                   : TruncationPolicy{};
    };

    if (family == "matrix_normal") {
        check_keys(j, {"family", "mu", "sigma", "theta"}, where);
        return MatrixNormalSpec{elliptical_from_json(j, where)};
    }
    if (family == "matricvariate_t") {
        check_keys(j, {"family", "nu", "mu", "sigma", "theta"}, where);
        return MatricvariateTSpec{need_number(j, "nu", where),
                                  elliptical_from_json(j, where)};
    }
    if (family == "hg_gamma" || family == "hg_gamma_inv") {
        check_keys(j, {"family", "a", "xi", "upsilon", "series"}, where);
        SpdMatrix xi(need_matrix(j, "xi", where));
        Matrix upsilon = j.contains("upsilon")
                             ? matrix_from_json(j.at("upsilon"))
                             : Matrix(Matrix::Zero(xi.dim(), xi.dim()));
        return HgGammaSpec{need_number(j, "a", where), std::move(xi),
                           std::move(upsilon), series_or_default(j),
                           family == "hg_gamma_inv"};
    }
    if (family == "hg_beta2" || family == "hg_beta2_inv") {
        check_keys(j, {"family", "a", "b", "xi", "series"}, where);
        double a = need_number(j, "a", where), b = need_number(j, "b", where);
        Matrix xi = j.contains("xi") ? matrix_from_json(j.at("xi")) : Matrix();
        HypergeomSpec series = series_or_default(j);
        if (xi.size() == 0)
            throw ConfigError(where + ": missing required key 'xi'");
        return HgBeta2Spec{a, b, std::move(xi), std::move(series),
                           family == "hg_beta2_inv"};
    }
    if (family == "gen_hg" || family == "gen_hg_inv") {
        GenHgForm form = form_from_json(j, where);
        if (form == GenHgForm::gauss)
            check_keys(j, {"family", "form", "alpha", "a", "b", "c", "xi", "truncation"},
                       where);
        else
            check_keys(j, {"family", "form", "alpha", "b", "c", "xi", "truncation"},
                       where);
        double a = form == GenHgForm::gauss ? need_number(j, "a", where)
                                            : std::numeric_limits<double>::quiet_NaN();
        return GenHgSpec{form,
                         need_number(j, "alpha", where),
                         a,
                         need_number(j, "b", where),
                         need_number(j, "c", where),
                         SpdMatrix(need_matrix(j, "xi", where)),
                         truncation_or_default(j),
                         family == "gen_hg_inv"};
    }
    if (family == "compound_thm1") {
        check_keys(j, {"family", "a", "xi", "upsilon", "series", "mu", "sigma", "theta"},
                   where);
        SpdMatrix xi(need_matrix(j, "xi", where));
        Matrix upsilon = j.contains("upsilon")
                             ? matrix_from_json(j.at("upsilon"))
                             : Matrix(Matrix::Zero(xi.dim(), xi.dim()));
        return CompoundThm1Spec{need_number(j, "a", where), std::move(xi),
                                std::move(upsilon), series_or_default(j),
                                elliptical_from_json(j, where)};
    }
    if (family == "compound_thm2") {
        check_keys(j, {"family", "a", "b", "xi", "series", "mu", "sigma", "theta"},
                   where);
        return CompoundThm2Spec{need_number(j, "a", where), need_number(j, "b", where),
                                need_matrix(j, "xi", where), series_or_default(j),
                                elliptical_from_json(j, where)};
    }
    if (family == "compound_thm3") {
        GenHgForm form = form_from_json(j, where);
        if (form == GenHgForm::gauss)
            check_keys(j, {"family", "form", "alpha", "a", "b", "c", "xi", "truncation",
                           "mu", "sigma", "theta"},
                       where);
        else
            check_keys(j, {"family", "form", "alpha", "b", "c", "xi", "truncation",
                           "mu", "sigma", "theta"},
                       where);
        double a = form == GenHgForm::gauss ? need_number(j, "a", where)
                                            : std::numeric_limits<double>::quiet_NaN();
        return CompoundThm3Spec{form,
                                need_number(j, "alpha", where),
                                a,
                                need_number(j, "b", where),
                                need_number(j, "c", where),
                                SpdMatrix(need_matrix(j, "xi", where)),
                                truncation_or_default(j),
                                elliptical_from_json(j, where)};
    }
    if (family == "compound_thm4") {
        check_keys(j, {"family", "nu", "a", "b", "truncation", "mu", "sigma", "theta"},
                   where);
        return CompoundThm4Spec{need_number(j, "nu", where), need_number(j, "a", where),
                                need_number(j, "b", where), truncation_or_default(j),
                                elliptical_from_json(j, where)};
    }
    if (family == "scale_mixture_thm5") {
        check_keys(j, {"family", "a", "xi", "upsilon", "series", "mu", "sigma", "theta"},
                   where);
        double upsilon = j.contains("upsilon") ? need_number(j, "upsilon", where) : 0.0;
        return ScaleMixThm5Spec{need_number(j, "a", where), need_number(j, "xi", where),
                                upsilon, series_or_default(j),
                                elliptical_from_json(j, where)};
    }
    throw ConfigError("distribution spec: unknown family '" + family + "'");
}

inline DistributionSpec distribution_from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open spec file " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("spec file " + path + ": " + e.what());
    }
    return distribution_from_json(j);
}

// Dimensions of the point space a family is evaluated on: (rows, cols).
inline std::pair<int, int> point_shape(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::pair<int, int> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MatrixNormalSpec> ||
                          std::is_same_v<T, MatricvariateTSpec> ||
                          std::is_same_v<T, CompoundThm1Spec> ||
                          std::is_same_v<T, CompoundThm2Spec> ||
                          std::is_same_v<T, CompoundThm3Spec> ||
                          std::is_same_v<T, CompoundThm4Spec> ||
                          std::is_same_v<T, ScaleMixThm5Spec>) {
                return {s.params.n(), s.params.m()};
            } else if constexpr (std::is_same_v<T, HgGammaSpec> ||
                                 std::is_same_v<T, GenHgSpec>) {
                return {s.xi.dim(), s.xi.dim()};
            } else {
                return {static_cast<int>(s.xi.rows()), static_cast<int>(s.xi.rows())};
            }
        },
        spec);
}

}  // namespace mvhg

#endif
