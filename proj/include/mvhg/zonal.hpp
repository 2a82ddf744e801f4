#ifndef MVHG_ZONAL_HPP
#define MVHG_ZONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <vector>

#include "mvhg/common.hpp"
#include "mvhg/partitions.hpp"

namespace mvhg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Zonal polynomials C_kappa(Y), normalized so that sum_{kappa |- k} C_kappa(Y)
// equals (tr Y)^k, expanded over monomial symmetric functions of the
// eigenvalues of Y:
//
//   C_kappa = sum_{lambda <= kappa}  c_{kappa,lambda}  M_lambda
//
// (dominance order). The coefficients come from the classical recurrence for
// the alpha = 2 Jack family: with rho_kappa = sum_i k_i (k_i - i),
//
//   c_{kappa,lambda} = sum_mu (l_i - l_j + 2t) / (rho_kappa - rho_lambda) * c_{kappa,mu}
//
// where mu runs over the sorted rearrangements of lambda with t units moved
// from part j to part i (i < j, 1 <= t <= l_j) and lambda < mu <= kappa. The
// leading coefficient is fixed in closed form,
//
//   c_{kappa,kappa} = 2^k k! / prod_{s in kappa} (leg(s) + 2 arm(s) + 2),
//
// and the build cross-checks the exact-rational identity
// sum_kappa c_{kappa,lambda} = k! / prod_i lambda_i! before anything is
// converted to floating point.
class ZonalTable {
  public:
    struct Entry {
        Partition kappa;
        // parallel arrays over lambda <= kappa (same index space as the
        // degree's partition list); only nonzero coefficients stored
        std::vector<int> lambda_index;
        std::vector<double> coeff;
        std::vector<Rational> coeff_exact;
    };

    int max_degree() const { return max_degree_; }
    int max_parts() const { return max_parts_; }

    const std::vector<Partition>& partitions_of(int k) const {
        return partitions_[static_cast<std::size_t>(k)];
    }

    const Entry& entry(const Partition& kappa) const {
        int k = kappa.weight();
        if (k > max_degree_)
            throw LookupError("ZonalTable: partition " + kappa.to_string() +
                              " exceeds table degree " + std::to_string(max_degree_));
        const auto& degree = entries_[static_cast<std::size_t>(k)];
        auto it = index_[static_cast<std::size_t>(k)].find(kappa);
        if (it == index_[static_cast<std::size_t>(k)].end())
            throw LookupError("ZonalTable: partition " + kappa.to_string() +
                              " not present (more than " + std::to_string(max_parts_) +
                              " parts?)");
        return degree[static_cast<std::size_t>(it->second)];
    }

    const std::vector<Entry>& entries_of(int k) const {
        return entries_[static_cast<std::size_t>(k)];
    }

    friend ZonalTable build_zonal_table(int, int, int);
    friend ZonalTable load_zonal_table(std::istream&);

  private:
    int max_degree_ = -1;
    int max_parts_ = 0;
    std::vector<std::vector<Partition>> partitions_;        // per degree
    std::vector<std::vector<Entry>> entries_;               // per degree
    std::vector<std::map<Partition, int>> index_;           // per degree
};

namespace detail {

inline long long rho_weight(const Partition& p) {
    long long r = 0;
    for (int i = 1; i <= p.size(); ++i)
        r += static_cast<long long>(p.part(i)) * (p.part(i) - i);
    return r;
}

// prod over cells of (leg + 2 arm + 2); legs via the conjugate partition.
inline BigInt hook_product(const Partition& p) {
    std::vector<int> conj(static_cast<std::size_t>(p.first()) + 1, 0);
    for (int c = 1; c <= p.first(); ++c) {
        int count = 0;
        for (int r = 1; r <= p.size(); ++r)
            if (p.part(r) >= c) ++count;
        conj[static_cast<std::size_t>(c)] = count;
    }
    BigInt prod = 1;
    for (int r = 1; r <= p.size(); ++r)
        for (int c = 1; c <= p.part(r); ++c) {
            int arm = p.part(r) - c;
            int leg = conj[static_cast<std::size_t>(c)] - r;
            prod *= (leg + 2 * arm + 2);
        }
    return prod;
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace detail

inline ZonalTable build_zonal_table(int max_degree, int max_parts,
                                    int degree_ceiling = 40) {
    if (max_degree < 0)
        throw DomainError("build_zonal_table: max_degree must be >= 0");
    if (max_parts < 1)
        throw DomainError("build_zonal_table: max_parts must be >= 1");
    if (max_degree > degree_ceiling)
        throw ResourceError("build_zonal_table: max_degree " + std::to_string(max_degree) +
                            " exceeds the configured ceiling " + std::to_string(degree_ceiling));

    ZonalTable table;
    table.max_degree_ = max_degree;
    table.max_parts_ = max_parts;
    table.partitions_.resize(static_cast<std::size_t>(max_degree) + 1);
    table.entries_.resize(static_cast<std::size_t>(max_degree) + 1);
    table.index_.resize(static_cast<std::size_t>(max_degree) + 1);

    for (int k = 0; k <= max_degree; ++k) {
        auto parts = enumerate_partitions(k, max_parts);
        const int np = static_cast<int>(parts.size());
        std::map<Partition, int> idx;
        for (int i = 0; i < np; ++i) idx[parts[static_cast<std::size_t>(i)]] = i;

        // coefficient matrix in exact rationals, row = kappa, col = lambda
        std::vector<std::vector<Rational>> c(
            static_cast<std::size_t>(np), std::vector<Rational>(static_cast<std::size_t>(np), 0));
        std::vector<long long> rho(static_cast<std::size_t>(np));
        for (int i = 0; i < np; ++i)
            rho[static_cast<std::size_t>(i)] = detail::rho_weight(parts[static_cast<std::size_t>(i)]);

        BigInt two_k_kfact = detail::factorial(k);
        two_k_kfact <<= k;  // 2^k k!

        for (int ik = 0; ik < np; ++ik) {
            const Partition& kappa = parts[static_cast<std::size_t>(ik)];
            c[static_cast<std::size_t>(ik)][static_cast<std::size_t>(ik)] =
                Rational(two_k_kfact, detail::hook_product(kappa));

            // reverse-lex enumeration is a linear extension of dominance, so
            // indices > ik are the only candidates below kappa
            for (int il = ik + 1; il < np; ++il) {
                const Partition& lambda = parts[static_cast<std::size_t>(il)];
                if (!dominated_by(lambda, kappa)) continue;
                Rational sum = 0;
                const int p = lambda.size();
                std::vector<int> work;
                for (int i = 0; i < p; ++i)
                    for (int j = i + 1; j < p; ++j) {
                        int li = lambda.part(i + 1);
                        int lj = lambda.part(j + 1);
                        for (int t = 1; t <= lj; ++t) {
                            work.assign(lambda.parts().begin(), lambda.parts().end());
                            work[static_cast<std::size_t>(i)] = li + t;
                            work[static_cast<std::size_t>(j)] = lj - t;
                            std::sort(work.begin(), work.end(), std::greater<int>());
                            while (!work.empty() && work.back() == 0) work.pop_back();
                            if (static_cast<int>(work.size()) > max_parts) continue;
                            Partition mu(work);
                            auto mit = idx.find(mu);
                            if (mit == idx.end()) continue;
                            int im = mit->second;
                            const Rational& cm = c[static_cast<std::size_t>(ik)][static_cast<std::size_t>(im)];
                            if (cm == 0) continue;  // mu not in (lambda, kappa]
                            if (mu == lambda) continue;
                            sum += Rational(li - lj + 2 * t) * cm;
                        }
                    }
                long long denom = rho[static_cast<std::size_t>(ik)] - rho[static_cast<std::size_t>(il)];
                if (denom == 0)
                    throw Error("build_zonal_table: vanishing rho difference (internal)");
                c[static_cast<std::size_t>(ik)][static_cast<std::size_t>(il)] = sum / denom;
            }
        }

        // exact consistency: column sums must reproduce the monomial
        // expansion of (tr Y)^k
        for (int il = 0; il < np; ++il) {
            Rational colsum = 0;
            for (int ik = 0; ik < np; ++ik)
                colsum += c[static_cast<std::size_t>(ik)][static_cast<std::size_t>(il)];
            BigInt denom = 1;
            const Partition& lambda = parts[static_cast<std::size_t>(il)];
            for (int i = 1; i <= lambda.size(); ++i)
                denom *= detail::factorial(lambda.part(i));
            if (colsum != Rational(detail::factorial(k), denom))
                throw Error("build_zonal_table: normalization identity failed at degree " +
                            std::to_string(k) + " (internal)");
        }

        table.partitions_[static_cast<std::size_t>(k)] = parts;
        table.index_[static_cast<std::size_t>(k)] = std::move(idx);
        auto& degree_entries = table.entries_[static_cast<std::size_t>(k)];
        degree_entries.resize(static_cast<std::size_t>(np));
        for (int ik = 0; ik < np; ++ik) {
            auto& e = degree_entries[static_cast<std::size_t>(ik)];
            e.kappa = parts[static_cast<std::size_t>(ik)];
            for (int il = 0; il < np; ++il) {
                const Rational& r = c[static_cast<std::size_t>(ik)][static_cast<std::size_t>(il)];
                if (r == 0) continue;
                e.lambda_index.push_back(il);
                e.coeff.push_back(static_cast<double>(r));
                e.coeff_exact.push_back(r);
            }
        }
    }
    return table;
}

namespace detail {

// Values of every monomial symmetric function M_lambda (lambda |- k, at most
// max_parts parts) at the given point, indexed like partitions_of(k).
inline std::vector<double> monomial_values(const std::vector<Partition>& lambdas,
                                           std::span<const double> x) {
    const int m = static_cast<int>(x.size());
    std::vector<double> out(lambdas.size(), 0.0);
    std::vector<int> exps;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const Partition& lam = lambdas[i];
        if (lam.size() > m) continue;  // vanishes with fewer variables
        exps.assign(static_cast<std::size_t>(m), 0);
        for (int j = 1; j <= lam.size(); ++j)
            exps[static_cast<std::size_t>(j - 1)] = lam.part(j);
        std::sort(exps.begin(), exps.end());
        double sum = 0.0;
        do {
            double prod = 1.0;
            for (int j = 0; j < m; ++j) {
                int e = exps[static_cast<std::size_t>(j)];
                if (e == 0) continue;
                double xe = x[static_cast<std::size_t>(j)];
                for (int q = 0; q < e; ++q) prod *= xe;
            }
            sum += prod;
        } while (std::next_permutation(exps.begin(), exps.end()));
        out[i] = sum;
    }
    return out;
}

}  // namespace detail

// C_kappa evaluated at diag(eigenvalues). Homogeneous of degree |kappa|;
// zero when kappa has more nonzero parts than there are eigenvalues.
inline double zonal_eval(const ZonalTable& table, const Partition& kappa,
                         std::span<const double> eigenvalues) {
    if (kappa.size() > static_cast<int>(eigenvalues.size())) return 0.0;
    const auto& e = table.entry(kappa);
    const auto& lambdas = table.partitions_of(kappa.weight());
    auto mono = detail::monomial_values(lambdas, eigenvalues);
    double sum = 0.0;
    for (std::size_t i = 0; i < e.lambda_index.size(); ++i)
        sum += e.coeff[i] * mono[static_cast<std::size_t>(e.lambda_index[i])];
    return sum;
}

inline double zonal_eval(const ZonalTable& table, const Partition& kappa,
                         const std::vector<double>& eigenvalues) {
    return zonal_eval(table, kappa, std::span<const double>(eigenvalues));
}

// All C_kappa of one degree at once; the monomial values are shared, which
// is what the series evaluator wants.
inline std::vector<double> zonal_eval_degree(const ZonalTable& table, int k,
                                             std::span<const double> eigenvalues) {
    const auto& lambdas = table.partitions_of(k);
    auto mono = detail::monomial_values(lambdas, eigenvalues);
    const auto& degree = table.entries_of(k);
    std::vector<double> out(degree.size(), 0.0);
    for (std::size_t i = 0; i < degree.size(); ++i) {
        const auto& e = degree[i];
        double sum = 0.0;
        for (std::size_t j = 0; j < e.lambda_index.size(); ++j)
            sum += e.coeff[j] * mono[static_cast<std::size_t>(e.lambda_index[j])];
        out[i] = sum;
    }
    return out;
}

// Versioned text dump: one line per partition, parts then exact-rational
// monomial coefficients, for inspection and regression pinning.
inline void dump_zonal_table(const ZonalTable& table, std::ostream& os) {
    os << "mvhg-zonal-table v1 max_degree=" << table.max_degree()
       << " max_parts=" << table.max_parts() << "\n";
    for (int k = 0; k <= table.max_degree(); ++k) {
        const auto& lambdas = table.partitions_of(k);
        for (const auto& e : table.entries_of(k)) {
            os << "kappa";
            for (int i = 1; i <= e.kappa.size(); ++i) os << ' ' << e.kappa.part(i);
            os << " :";
            for (std::size_t j = 0; j < e.lambda_index.size(); ++j) {
                const auto& lam = lambdas[static_cast<std::size_t>(e.lambda_index[j])];
                os << "  [";
                for (int i = 1; i <= lam.size(); ++i) {
                    if (i > 1) os << ',';
                    os << lam.part(i);
                }
                os << "] " << e.coeff_exact[j];
            }
            os << "\n";
        }
    }
}

inline ZonalTable load_zonal_table(std::istream& is) {
    std::string tag, ver;
    is >> tag >> ver;
    if (tag != "mvhg-zonal-table" || ver != "v1")
        throw ConfigError("load_zonal_table: unrecognized header '" + tag + " " + ver + "'");
    std::string kv;
    int max_degree = -1, max_parts = -1;
    for (int i = 0; i < 2; ++i) {
        is >> kv;
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("load_zonal_table: bad header field " + kv);
        std::string key = kv.substr(0, eq);
        int value = std::stoi(kv.substr(eq + 1));
        if (key == "max_degree") max_degree = value;
        else if (key == "max_parts") max_parts = value;
        else throw ConfigError("load_zonal_table: unknown header key " + key);
    }
    if (max_degree < 0 || max_parts < 1)
        throw ConfigError("load_zonal_table: incomplete header");

    ZonalTable table;
    table.max_degree_ = max_degree;
    table.max_parts_ = max_parts;
    table.partitions_.resize(static_cast<std::size_t>(max_degree) + 1);
    table.entries_.resize(static_cast<std::size_t>(max_degree) + 1);
    table.index_.resize(static_cast<std::size_t>(max_degree) + 1);
    for (int k = 0; k <= max_degree; ++k) {
        auto parts = enumerate_partitions(k, max_parts);
        std::map<Partition, int> idx;
        for (std::size_t i = 0; i < parts.size(); ++i) idx[parts[i]] = static_cast<int>(i);
        table.entries_[static_cast<std::size_t>(k)].resize(parts.size());
        table.partitions_[static_cast<std::size_t>(k)] = parts;
        table.index_[static_cast<std::size_t>(k)] = std::move(idx);
    }

    std::string word;
    while (is >> word) {
        if (word != "kappa")
            throw ConfigError("load_zonal_table: expected 'kappa', got '" + word + "'");
        std::vector<int> kparts;
        while (is >> word && word != ":") kparts.push_back(std::stoi(word));
        Partition kappa(kparts);
        int k = kappa.weight();
        if (k > max_degree) throw ConfigError("load_zonal_table: degree beyond header");
        auto& degree_index = table.index_[static_cast<std::size_t>(k)];
        auto kit = degree_index.find(kappa);
        if (kit == degree_index.end())
            throw ConfigError("load_zonal_table: partition outside table shape");
        auto& e = table.entries_[static_cast<std::size_t>(k)][static_cast<std::size_t>(kit->second)];
        e.kappa = kappa;
        // coefficients until end of line
        std::string line;
        std::getline(is, line);
        std::istringstream ls(line);
        std::string bracket, ratio;
        while (ls >> bracket >> ratio) {
            if (bracket.front() != '[' || bracket.back() != ']')
                throw ConfigError("load_zonal_table: malformed lambda " + bracket);
            std::vector<int> lparts;
            std::string inner = bracket.substr(1, bracket.size() - 2);
            std::istringstream es(inner);
            std::string tok;
            while (std::getline(es, tok, ','))
                if (!tok.empty()) lparts.push_back(std::stoi(tok));
            Partition lam(lparts);
            auto lit = degree_index.find(lam);
            if (lit == degree_index.end())
                throw ConfigError("load_zonal_table: lambda outside table shape");
            Rational r(ratio);
            e.lambda_index.push_back(lit->second);
            e.coeff.push_back(static_cast<double>(r));
            e.coeff_exact.push_back(r);
        }
    }
    return table;
}

// Process-wide memoized tables keyed by (max_degree, max_parts). Build cost
// dominates repeated-density workloads, so tables are built once and shared;
// returned references stay valid for the process lifetime.
inline const ZonalTable& zonal_table_cache(int max_degree, int max_parts,
                                           int degree_ceiling = 40) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<ZonalTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(max_degree, max_parts);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto built = std::make_unique<ZonalTable>(
            build_zonal_table(max_degree, max_parts, degree_ceiling));
        it = cache.emplace(key, std::move(built)).first;
    }
    return *it->second;
}

}  // namespace mvhg

#endif
