#include "plantedrank/lowdeg.hpp"

#include "plantedrank/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace plantedrank {

bool BipartiteTemplate::v1_isolated() const {
    if (variant != TemplateVariant::Estimation) return false;
    for (const auto& [v, w] : edges)
        if (v == 0) return false;
    return true;
}

namespace {

// Column bitmasks with V-node 0 as the most significant bit, so sorting masks
// descending yields the lexicographically smallest row-major edge list for a
// fixed row relabeling.
std::vector<std::uint64_t> column_masks(int v_count, int w_count,
                                        const std::vector<std::pair<int, int>>& edges,
                                        const std::vector<int>& tau_v) {
    std::vector<std::uint64_t> mask(w_count, 0);
    for (const auto& [v, w] : edges)
        mask[w] |= std::uint64_t{1} << (v_count - 1 - tau_v[v]);
    return mask;
}

std::vector<std::pair<int, int>> edges_from_sorted_masks(int v_count,
                                                         std::vector<std::uint64_t> masks) {
    std::sort(masks.begin(), masks.end(), std::greater<>());
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j < static_cast<int>(masks.size()); ++j)
        for (int v = 0; v < v_count; ++v)
            if (masks[j] >> (v_count - 1 - v) & 1) out.emplace_back(v, j);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::pair<int, int>> canonical_edges(int v_count, int w_count,
                                                 std::vector<std::pair<int, int>> edges,
                                                 bool fix_v0) {
    std::sort(edges.begin(), edges.end());
    std::vector<int> tau(v_count);
    std::iota(tau.begin(), tau.end(), 0);
    std::vector<std::pair<int, int>> best;
    const auto first_free = fix_v0 ? tau.begin() + 1 : tau.begin();
    do {
        auto candidate = edges_from_sorted_masks(
            v_count, column_masks(v_count, w_count, edges, tau));
        if (best.empty() || candidate < best) best = std::move(candidate);
    } while (std::next_permutation(first_free, tau.end()));
    return best;
}

long long aut_count(const BipartiteTemplate& g) {
    const bool fix_v0 = g.variant == TemplateVariant::Estimation;
    std::vector<int> identity(g.v_count);
    std::iota(identity.begin(), identity.end(), 0);
    auto original = column_masks(g.v_count, g.w_count, g.edges, identity);
    std::multiset<std::uint64_t> original_multiset(original.begin(), original.end());

    std::vector<int> tau = identity;
    const auto first_free = fix_v0 ? tau.begin() + 1 : tau.begin();
    long long total = 0;
    do {
        auto transformed = column_masks(g.v_count, g.w_count, g.edges, tau);
        std::multiset<std::uint64_t> transformed_multiset(transformed.begin(),
                                                          transformed.end());
        if (transformed_multiset != original_multiset) continue;
        long long ways = 1;
        for (auto it = original_multiset.begin(); it != original_multiset.end();) {
            const auto count = original_multiset.count(*it);
            for (long long f = 2; f <= static_cast<long long>(count); ++f) ways *= f;
            std::advance(it, count);
        }
        total += ways;
    } while (std::next_permutation(first_free, tau.end()));
    return total;
}

int component_count(const BipartiteTemplate& g) {
    const int total = g.v_count + g.w_count;
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [v, w] : g.edges) parent[find(v)] = find(g.v_count + w);
    std::set<int> roots;
    for (const auto& [v, w] : g.edges) {
        roots.insert(find(v));
        roots.insert(find(g.v_count + w));
    }
    return static_cast<int>(roots.size());
}

namespace {

CatalogEntry make_entry(TemplateVariant variant, int v_count, int w_count,
                        std::vector<std::pair<int, int>> edges) {
    CatalogEntry entry;
    entry.tmpl.variant = variant;
    entry.tmpl.v_count = v_count;
    entry.tmpl.w_count = w_count;
    entry.tmpl.edges = std::move(edges);
    entry.aut = aut_count(entry.tmpl);
    entry.cc = component_count(entry.tmpl);
    return entry;
}

// All e-subsets of the v_count x w_count grid that satisfy the coverage rule.
template <typename Emit>
void enumerate_grids(int v_count, int w_count, int e, bool allow_isolated_v0, Emit emit) {
    const int cells = v_count * w_count;
    if (cells < e) return;
    std::vector<int> comb(e);
    std::iota(comb.begin(), comb.end(), 0);
    std::vector<std::pair<int, int>> edges(e);
    for (;;) {
        unsigned rows_used = 0, cols_used = 0;
        for (int i = 0; i < e; ++i) {
            const int v = comb[i] / w_count, w = comb[i] % w_count;
            edges[i] = {v, w};
            rows_used |= 1u << v;
            cols_used |= 1u << w;
        }
        const unsigned all_rows = (1u << v_count) - 1;
        const unsigned all_cols = (1u << w_count) - 1;
        const unsigned needed_rows = allow_isolated_v0 ? all_rows & ~1u : all_rows;
        if ((rows_used & needed_rows) == needed_rows && cols_used == all_cols) {
            // Row 0 must genuinely be isolated in the allow_isolated case only
            // when v_count exceeds the covered rows; both shapes are valid.
            emit(edges, (rows_used & 1u) != 0);
        }
        // next combination
        int i = e - 1;
        while (i >= 0 && comb[i] == cells - e + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < e; ++j) comb[j] = comb[j - 1] + 1;
    }
}

}  // namespace

TemplateCatalog enumerate_templates(int max_edges, TemplateVariant variant, int hard_cap) {
    if (max_edges < 1 || max_edges > hard_cap)
        throw InvalidArgument("template degree cap must satisfy 1 <= D <= cap");
    TemplateCatalog catalog;
    catalog.degree_cap = max_edges;
    catalog.variant = variant;

    std::set<std::vector<int>> seen;
    auto try_insert = [&](int v_count, int w_count, std::vector<std::pair<int, int>> canon) {
        std::vector<int> key{v_count, w_count};
        for (const auto& [v, w] : canon) {
            key.push_back(v);
            key.push_back(w);
        }
        if (!seen.insert(std::move(key)).second) return;
        catalog.entries.push_back(make_entry(variant, v_count, w_count, std::move(canon)));
    };

    for (int e = 1; e <= max_edges; ++e) {
        if (variant == TemplateVariant::Detection) {
            for (int r = 1; r <= e; ++r)
                for (int s = 1; s <= e; ++s)
                    enumerate_grids(r, s, e, /*allow_isolated_v0=*/false,
                                    [&](const std::vector<std::pair<int, int>>& edges, bool) {
                                        try_insert(r, s,
                                                   canonical_edges(r, s, edges, false));
                                    });
        } else {
            for (int r = 1; r <= e + 1; ++r)
                for (int s = 1; s <= e; ++s)
                    enumerate_grids(r, s, e, /*allow_isolated_v0=*/true,
                                    [&](const std::vector<std::pair<int, int>>& edges, bool) {
                                        try_insert(r, s, canonical_edges(r, s, edges, true));
                                    });
        }
    }

    std::sort(catalog.entries.begin(), catalog.entries.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) {
                  return std::tuple(a.tmpl.edge_count(), a.tmpl.v_count, a.tmpl.w_count,
                                    a.tmpl.edges) < std::tuple(b.tmpl.edge_count(),
                                                               b.tmpl.v_count,
                                                               b.tmpl.w_count, b.tmpl.edges);
              });
    return catalog;
}

bool satisfies_counting_bounds(const CatalogEntry& e) {
    const int isolated = e.tmpl.v1_isolated() ? 1 : 0;
    const int v = e.tmpl.v_count - isolated;
    const int w = e.tmpl.w_count;
    const int edges = e.tmpl.edge_count();
    return edges + e.cc >= v + w && std::min(v, w) >= e.cc && edges >= std::max(v, w);
}

namespace {

void check_prior(const PriorSpec& prior) {
    if (prior.n < 1 || prior.d < 1 || prior.kn < 1 || prior.kn > prior.n || prior.kd < 1 ||
        prior.kd > prior.d || !(prior.lambda >= 0.0 && prior.lambda <= 1.0))
        throw InvalidArgument("prior needs 1 <= K_n <= n, 1 <= K_d <= d, lambda in [0,1]");
}

double lg(double x) { return std::lgamma(x); }

}  // namespace

double psi_moment_detection(const CatalogEntry& entry, const PriorSpec& prior) {
    check_prior(prior);
    if (prior.kind != PriorSpec::Kind::DetectionUniform)
        throw InvalidArgument("detection moment needs a detection prior");
    const int r = entry.tmpl.v_count, s = entry.tmpl.w_count, e = entry.tmpl.edge_count();
    if (r > prior.kn || s > prior.kd) return 0.0;
    if (prior.lambda == 0.0) return 0.0;
    const double n = static_cast<double>(prior.n), d = static_cast<double>(prior.d);
    const double kn = static_cast<double>(prior.kn), kd = static_cast<double>(prior.kd);
    const double log_value = 0.5 * (lg(n - r + 1) + lg(d - s + 1) - lg(n + 1) - lg(d + 1) -
                                    std::log(static_cast<double>(entry.aut))) +
                             e * std::log(prior.lambda) + lg(kn + 1) - lg(kn - r + 1) +
                             lg(kd + 1) - lg(kd - s + 1);
    return std::exp(log_value);
}

double adv_low_degree(const TemplateCatalog& catalog, const PriorSpec& prior, int degree) {
    check_prior(prior);
    if (catalog.variant != TemplateVariant::Detection || catalog.degree_cap < degree)
        throw InvalidArgument("advantage needs a detection catalog covering the degree");
    double sum = 1.0;
    for (const auto& entry : catalog.entries) {
        if (entry.tmpl.edge_count() > degree) continue;
        const double m = psi_moment_detection(entry, prior);
        sum += m * m;
    }
    return sum;
}

double adv_low_degree(const PriorSpec& prior, int degree) {
    return adv_low_degree(enumerate_templates(degree, TemplateVariant::Detection), prior,
                          degree);
}

double adv_bruteforce(const PriorSpec& prior, int degree, long long budget) {
    check_prior(prior);
    if (degree < 1) throw InvalidArgument("degree must be >= 1");
    const long long cells = prior.n * prior.d;

    double count = 0.0, binom = 1.0;
    for (int j = 1; j <= degree; ++j) {
        binom = binom * static_cast<double>(cells - j + 1) / j;
        count += binom;
        if (count > static_cast<double>(budget))
            throw InvalidArgument("brute-force subset enumeration exceeds budget");
    }

    // Falling-factorial ratios (K)_r / (N)_r, zero once r exceeds K.
    auto ratios = [&](long long K, long long N) {
        std::vector<double> out(degree + 1, 0.0);
        out[0] = 1.0;
        for (int r = 1; r <= degree; ++r) {
            if (r > K) break;
            out[r] = out[r - 1] * static_cast<double>(K - r + 1) /
                     static_cast<double>(N - r + 1);
        }
        return out;
    };
    const auto row_ratio = ratios(prior.kn, prior.n);
    const auto col_ratio = ratios(prior.kd, prior.d);

    const int n = static_cast<int>(prior.n), d = static_cast<int>(prior.d);
    std::vector<int> row_count(n, 0), col_count(d, 0);
    double total = 1.0;
    int distinct_rows = 0, distinct_cols = 0;

    std::function<void(int, int, double)> rec = [&](int start, int depth, double lambda_pow) {
        for (int cell = start; cell < n * d; ++cell) {
            const int i = cell / d, k = cell % d;
            if (row_count[i]++ == 0) ++distinct_rows;
            if (col_count[k]++ == 0) ++distinct_cols;
            const double next_pow = lambda_pow * prior.lambda;
            const double moment = next_pow * row_ratio[distinct_rows] * col_ratio[distinct_cols];
            total += moment * moment;
            if (depth + 1 < degree) rec(cell + 1, depth + 1, next_pow);
            if (--row_count[i] == 0) --distinct_rows;
            if (--col_count[k] == 0) --distinct_cols;
        }
    };
    rec(0, 0, 1.0);
    return total;
}

DetectionRiskBound detection_risk_lb(double adv_sq) {
    if (adv_sq < 0.0) throw InvalidArgument("squared advantage must be >= 0");
    DetectionRiskBound b;
    b.primary = 1.0 / (2.0 * (1.0 + adv_sq));
    b.secondary = (1.0 - (std::sqrt(adv_sq) - 1.0)) / 4.0;
    return b;
}

DetectionRiskBound detection_risk_lb(double adv_sq, const PriorSpec& prior, int degree,
                                     double c_bar) {
    DetectionRiskBound b = detection_risk_lb(adv_sq);
    check_prior(prior);
    const double lam = prior.lambda;
    const double kn = static_cast<double>(prior.kn), kd = static_cast<double>(prior.kd);
    const double n = static_cast<double>(prior.n), d = static_cast<double>(prior.d);
    const double shrink =
        std::max({lam * std::sqrt(std::min<double>(degree, std::min(kn, kd))),
                  lam * kd / std::sqrt(d), lam * kn / std::sqrt(n),
                  lam * kn * kd / std::sqrt(n * d)});
    if (c_bar >= 10.0 && shrink <= std::pow(2.0, -2.0 - c_bar))
        b.certified = 0.25 * (1.0 - std::pow(2.0, -c_bar));
    return b;
}

double corr_star_moment(const CatalogEntry& entry, const PriorSpec& prior) {
    check_prior(prior);
    if (prior.kind != PriorSpec::Kind::EstimationBernoulli ||
        entry.tmpl.variant != TemplateVariant::Estimation)
        throw InvalidArgument("correlation moment needs an estimation template and prior");
    if (entry.cc > 1) return 0.0;  // some edge-component avoids v1, moment factorizes to 0
    if (entry.tmpl.v1_isolated())
        throw UnsupportedTemplate(
            "isolated v1 with a single edge-component: moment is ambiguous");
    if (prior.lambda == 0.0) return 0.0;
    const int r = entry.tmpl.v_count, s = entry.tmpl.w_count, e = entry.tmpl.edge_count();
    const double n = static_cast<double>(prior.n), d = static_cast<double>(prior.d);
    const double pn = static_cast<double>(prior.kn) / n, pd = static_cast<double>(prior.kd) / d;
    const double log_value = 0.5 * (lg(n) - lg(n - r + 1) + lg(d + 1) - lg(d - s + 1) -
                                    std::log(static_cast<double>(entry.aut))) +
                             e * std::log(prior.lambda) + r * std::log(pn) + s * std::log(pd);
    return std::exp(log_value) * (1.0 - pn);
}

namespace {

double exact_e_x_star(const PriorSpec& prior) {
    const double pn = static_cast<double>(prior.kn) / static_cast<double>(prior.n);
    const double pd = static_cast<double>(prior.kd) / static_cast<double>(prior.d);
    return pn * (1.0 - std::pow(1.0 - pd, static_cast<double>(prior.d)));
}

}  // namespace

CorrBound estimation_corr_bound(const PriorSpec& prior, int degree, double c_s) {
    check_prior(prior);
    if (degree < 2) throw InvalidArgument("correlation bound needs D >= 2");
    if (!(c_s > 0.0)) throw InvalidArgument("c_s must be positive");
    CorrBound bound;
    bound.e_x_star = exact_e_x_star(prior);
    bound.raw_sum = bound.e_x_star * bound.e_x_star;
    const TemplateCatalog catalog = enumerate_templates(degree, TemplateVariant::Estimation);
    for (const auto& entry : catalog.entries) {
        try {
            const double m = corr_star_moment(entry, prior);
            bound.raw_sum += m * m;
        } catch (const UnsupportedTemplate&) {
            ++bound.skipped;  // contributes 0 under the row-membership x*
        }
    }
    bound.inflated = bound.raw_sum / (1.0 - std::pow(static_cast<double>(degree), -c_s / 4.0));
    return bound;
}

double estimation_risk_lb(const PriorSpec& prior, double corr_sq) {
    check_prior(prior);
    if (corr_sq < 0.0) throw InvalidArgument("squared correlation must be >= 0");
    return std::max(0.0, exact_e_x_star(prior) - corr_sq);
}

// ---------------------------------------------------------------------------
// Monte Carlo validation by explicit labeling sums.

namespace {

std::vector<std::vector<int>> injective_maps(int arity, int universe, int fixed_first) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(arity, -1);
    std::vector<char> used(universe, 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == arity) {
            out.push_back(current);
            return;
        }
        for (int x = 0; x < universe; ++x) {
            if (used[x]) continue;
            used[x] = 1;
            current[pos] = x;
            rec(pos + 1);
            used[x] = 0;
        }
    };
    if (fixed_first >= 0) {
        used[fixed_first] = 1;
        current[0] = fixed_first;
        rec(1);
    } else {
        rec(0);
    }
    return out;
}

struct Component {
    std::vector<std::pair<int, int>> edges;
    int v_nodes = 0, w_nodes = 0;
};

std::vector<Component> edge_components(const BipartiteTemplate& g) {
    const int total = g.v_count + g.w_count;
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [v, w] : g.edges) parent[find(v)] = find(g.v_count + w);
    std::map<int, Component> by_root;
    std::map<int, std::set<int>> v_sets, w_sets;
    for (const auto& [v, w] : g.edges) {
        const int root = find(v);
        by_root[root].edges.emplace_back(v, w);
        v_sets[root].insert(v);
        w_sets[root].insert(w);
    }
    std::vector<Component> out;
    for (auto& [root, comp] : by_root) {
        comp.v_nodes = static_cast<int>(v_sets[root].size());
        comp.w_nodes = static_cast<int>(w_sets[root].size());
        out.push_back(std::move(comp));
    }
    return out;
}

double falling_factorial(long long n, int r) {
    double v = 1.0;
    for (int i = 0; i < r; ++i) v *= static_cast<double>(n - i);
    return v;
}

struct PsiEvaluator {
    const BipartiteTemplate* tmpl = nullptr;
    std::vector<std::vector<int>> row_maps, col_maps;
    std::vector<Component> components;       // estimation centering
    std::vector<double> component_means;     // E[P_l] under the Bernoulli prior
    double norm = 1.0;                       // sqrt(V(G)) or sqrt(V*(G))

    double evaluate_detection(const ObservationMatrix& y) const {
        double sum = 0.0;
        for (const auto& rm : row_maps)
            for (const auto& cm : col_maps) {
                double prod = 1.0;
                for (const auto& [v, w] : tmpl->edges) prod *= y.at(rm[v], cm[w]);
                sum += prod;
            }
        return sum / norm;
    }

    double evaluate_estimation(const ObservationMatrix& y) const {
        double sum = 0.0;
        for (const auto& rm : row_maps)
            for (const auto& cm : col_maps) {
                double prod = 1.0;
                for (std::size_t l = 0; l < components.size(); ++l) {
                    double p = 1.0;
                    for (const auto& [v, w] : components[l].edges) p *= y.at(rm[v], cm[w]);
                    prod *= p - component_means[l];
                }
                sum += prod;
            }
        return sum / norm;
    }
};

PsiEvaluator make_evaluator(const CatalogEntry& entry, const PriorSpec& prior,
                            long long labeling_budget) {
    const auto& g = entry.tmpl;
    const int r = g.v_count, s = g.w_count;
    const bool estimation = g.variant == TemplateVariant::Estimation;
    const double row_labelings = estimation ? falling_factorial(prior.n - 1, r - 1)
                                            : falling_factorial(prior.n, r);
    const double col_labelings = falling_factorial(prior.d, s);
    if (row_labelings * col_labelings > static_cast<double>(labeling_budget))
        throw InvalidArgument("labeling enumeration exceeds budget");

    PsiEvaluator ev;
    ev.tmpl = &g;
    ev.row_maps = injective_maps(r, static_cast<int>(prior.n), estimation ? 0 : -1);
    ev.col_maps = injective_maps(s, static_cast<int>(prior.d), -1);
    ev.norm = std::sqrt(row_labelings * col_labelings * static_cast<double>(entry.aut));
    if (estimation) {
        ev.components = edge_components(g);
        const double pn = static_cast<double>(prior.kn) / static_cast<double>(prior.n);
        const double pd = static_cast<double>(prior.kd) / static_cast<double>(prior.d);
        for (const auto& comp : ev.components)
            ev.component_means.push_back(std::pow(prior.lambda, comp.edges.size()) *
                                         std::pow(pn, comp.v_nodes) *
                                         std::pow(pd, comp.w_nodes));
    }
    return ev;
}

ObservationMatrix sample_rademacher(int n, int d, Rng& rng) {
    ObservationMatrix y(n, d);
    for (auto& v : y.data) v = rng.bernoulli(0.5) ? 1 : -1;
    return y;
}

MomentEstimate summarize_moment(double sum, double sum_sq, long long reps) {
    MomentEstimate est;
    est.replicates = reps;
    est.mean = sum / static_cast<double>(reps);
    if (reps > 1) {
        const double var =
            (sum_sq - sum * sum / static_cast<double>(reps)) / static_cast<double>(reps - 1);
        est.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(reps));
    }
    return est;
}

}  // namespace

MomentEstimate mc_moment_check(const CatalogEntry& entry, const PriorSpec& prior,
                               long long replicates, std::uint64_t seed,
                               long long labeling_budget) {
    check_prior(prior);
    if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
    const PsiEvaluator ev = make_evaluator(entry, prior, labeling_budget);
    const int n = static_cast<int>(prior.n), d = static_cast<int>(prior.d);
    double sum = 0.0, sum_sq = 0.0;
    Rng rng(derive_seed(seed, 0, "mc-moment"));
    for (long long rep = 0; rep < replicates; ++rep) {
        double value = 0.0;
        if (prior.kind == PriorSpec::Kind::DetectionUniform) {
            BlockSpec block;
            block.lambda = prior.lambda;
            block.rows = rng.subset(n, static_cast<int>(prior.kn));
            block.cols = rng.subset(d, static_cast<int>(prior.kd));
            Matrix m(n, d);
            if (prior.lambda > 0.0)
                for (int i : block.rows)
                    for (int k : block.cols) m.at(i, k) = prior.lambda;
            const ObservationMatrix y = sample_observations(m, rng);
            value = ev.evaluate_detection(y);
        } else {
            std::vector<char> in_s(n), in_t(d);
            const double pn = static_cast<double>(prior.kn) / prior.n;
            const double pd = static_cast<double>(prior.kd) / prior.d;
            for (int i = 0; i < n; ++i) in_s[i] = rng.bernoulli(pn);
            for (int k = 0; k < d; ++k) in_t[k] = rng.bernoulli(pd);
            Matrix m(n, d);
            for (int i = 0; i < n; ++i)
                if (in_s[i])
                    for (int k = 0; k < d; ++k)
                        if (in_t[k]) m.at(i, k) = prior.lambda;
            const ObservationMatrix y = sample_observations(m, rng);
            const double x_star = in_s[0] ? 1.0 : 0.0;  // row-membership functional
            value = x_star * ev.evaluate_estimation(y);
        }
        sum += value;
        sum_sq += value * value;
    }
    return summarize_moment(sum, sum_sq, replicates);
}

MomentEstimate mc_psi_null_mean(const CatalogEntry& entry, long long n, long long d,
                                long long replicates, std::uint64_t seed,
                                long long labeling_budget) {
    PriorSpec prior;
    prior.kind = entry.tmpl.variant == TemplateVariant::Detection
                     ? PriorSpec::Kind::DetectionUniform
                     : PriorSpec::Kind::EstimationBernoulli;
    prior.n = n;
    prior.d = d;
    const PsiEvaluator ev = make_evaluator(entry, prior, labeling_budget);
    double sum = 0.0, sum_sq = 0.0;
    Rng rng(derive_seed(seed, 0, "mc-null"));
    for (long long rep = 0; rep < replicates; ++rep) {
        const ObservationMatrix y = sample_rademacher(static_cast<int>(n),
                                                      static_cast<int>(d), rng);
        const double value = entry.tmpl.variant == TemplateVariant::Detection
                                 ? ev.evaluate_detection(y)
                                 : ev.evaluate_estimation(y);
        sum += value;
        sum_sq += value * value;
    }
    return summarize_moment(sum, sum_sq, replicates);
}

GramCheck mc_gram_null(const TemplateCatalog& catalog, long long n, long long d,
                       long long replicates, std::uint64_t seed, long long labeling_budget) {
    if (replicates < 2) throw InvalidArgument("gram check needs at least 2 replicates");
    PriorSpec prior;
    prior.kind = catalog.variant == TemplateVariant::Detection
                     ? PriorSpec::Kind::DetectionUniform
                     : PriorSpec::Kind::EstimationBernoulli;
    prior.n = n;
    prior.d = d;
    std::vector<PsiEvaluator> evs;
    for (const auto& entry : catalog.entries) evs.push_back(make_evaluator(entry, prior,
                                                                           labeling_budget));
    const int t = static_cast<int>(evs.size());
    std::vector<double> sum(t * t, 0.0), sum_sq(t * t, 0.0), psi(t);
    Rng rng(derive_seed(seed, 0, "mc-gram"));
    for (long long rep = 0; rep < replicates; ++rep) {
        const ObservationMatrix y = sample_rademacher(static_cast<int>(n),
                                                      static_cast<int>(d), rng);
        for (int i = 0; i < t; ++i)
            psi[i] = catalog.variant == TemplateVariant::Detection
                         ? evs[i].evaluate_detection(y)
                         : evs[i].evaluate_estimation(y);
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j) {
                const double v = psi[i] * psi[j];
                sum[i * t + j] += v;
                sum_sq[i * t + j] += v * v;
            }
    }
    GramCheck check;
    check.size = t;
    check.mean.resize(t * t);
    check.stderr_.resize(t * t);
    for (int idx = 0; idx < t * t; ++idx) {
        const auto est = summarize_moment(sum[idx], sum_sq[idx], replicates);
        check.mean[idx] = est.mean;
        check.stderr_[idx] = est.stderr_;
    }
    return check;
}

}  // namespace plantedrank
