#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "plantedrank/matrix.hpp"
#include "plantedrank/rng.hpp"

namespace plantedrank {

enum class TemplateVariant { Detection, Estimation };

// Isomorphism-class representative of a bipartite graph. V-nodes index rows,
// W-nodes index columns; the two sides are never interchanged. For the
// estimation variant, V-node 0 is the distinguished v1 and relabelings fix it;
// v1 is the only node allowed to be isolated.
struct BipartiteTemplate {
    TemplateVariant variant = TemplateVariant::Detection;
    int v_count = 0;
    int w_count = 0;
    std::vector<std::pair<int, int>> edges;  // canonical, sorted (v,w) pairs

    int edge_count() const { return static_cast<int>(edges.size()); }
    bool v1_isolated() const;  // estimation only: no edge touches V-node 0
};

// Lexicographically minimal edge encoding over admissible relabelings.
std::vector<std::pair<int, int>> canonical_edges(int v_count, int w_count,
                                                 std::vector<std::pair<int, int>> edges,
                                                 bool fix_v0);

// Exact count of edge-preserving relabeling pairs (fixing v1 when the
// template is an estimation one).
long long aut_count(const BipartiteTemplate& g);

int component_count(const BipartiteTemplate& g);  // connected components with edges

struct CatalogEntry {
    BipartiteTemplate tmpl;
    long long aut = 1;  // |Aut| (detection) or |Aut*| (estimation)
    int cc = 1;
};

struct TemplateCatalog {
    int degree_cap = 0;
    TemplateVariant variant = TemplateVariant::Detection;
    std::vector<CatalogEntry> entries;  // deterministic canonical order
};

// Exhaustive generation by edge count, deduplicated by canonical form.
TemplateCatalog enumerate_templates(int max_edges, TemplateVariant variant, int hard_cap = 6);

// Counting-lemma invariants on non-isolated node counts:
// |E|+cc >= |V|+|W|, |V|^|W| >= cc, |E| >= |V|v|W|.
bool satisfies_counting_bounds(const CatalogEntry& e);

struct PriorSpec {
    enum class Kind { DetectionUniform, EstimationBernoulli };
    Kind kind = Kind::DetectionUniform;
    long long n = 1, d = 1;
    double lambda = 0.0;
    long long kn = 1, kd = 1;
};

// First moment of the normalized template polynomial under the uniform block
// prior; zero when the template needs more rows/columns than the block has.
double psi_moment_detection(const CatalogEntry& entry, const PriorSpec& prior);

// Squared degree-D advantage: 1 plus the sum of squared first moments.
double adv_low_degree(const PriorSpec& prior, int degree);
double adv_low_degree(const TemplateCatalog& catalog, const PriorSpec& prior, int degree);

// Independent oracle: exact enumeration over all cell subsets of size <= D.
double adv_bruteforce(const PriorSpec& prior, int degree, long long budget = 1'000'000);

struct DetectionRiskBound {
    double primary = 0.0;    // 1 / (2 (1 + adv^2))
    double secondary = 0.0;  // (1 - (|adv| - 1)) / 4
    std::optional<double> certified;  // (1 - 2^{-c})/4 when the smallness condition holds
};

DetectionRiskBound detection_risk_lb(double adv_sq);
DetectionRiskBound detection_risk_lb(double adv_sq, const PriorSpec& prior, int degree,
                                     double c_bar);

struct UnsupportedTemplate : Error {
    using Error::Error;
};

// First moment of x* Psi*_G under the Bernoulli prior, x* = 1{row 0 in S}.
// Templates whose edges split into several components give 0; a template with
// isolated v1 and a single edge-component is rejected as ambiguous.
double corr_star_moment(const CatalogEntry& entry, const PriorSpec& prior);

struct CorrBound {
    double e_x_star = 0.0;  // exact (K_n/n)(1 - (1-K_d/d)^d)
    double raw_sum = 0.0;   // E^2[x*] + sum of squared moments
    double inflated = 0.0;  // raw / (1 - D^{-c_s/4})
    int skipped = 0;        // ambiguous isolated-v1 templates treated as 0
};

CorrBound estimation_corr_bound(const PriorSpec& prior, int degree, double c_s = 18.0);

// max(0, E[x*^2] - corr_sq) with E[x*^2] = E[x*].
double estimation_risk_lb(const PriorSpec& prior, double corr_sq);

struct MomentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long replicates = 0;
};

// Monte Carlo validation of the closed forms by explicit labeling sums:
// detection priors estimate E[Psi_G], estimation priors estimate E[x* Psi*_G].
MomentEstimate mc_moment_check(const CatalogEntry& entry, const PriorSpec& prior,
                               long long replicates, std::uint64_t seed,
                               long long labeling_budget = 100'000);

// E[Psi_G] under the Rademacher null (should vanish).
MomentEstimate mc_psi_null_mean(const CatalogEntry& entry, long long n, long long d,
                                long long replicates, std::uint64_t seed,
                                long long labeling_budget = 100'000);

struct GramCheck {
    int size = 0;
    std::vector<double> mean;     // size x size, row-major, E[Psi_i Psi_j]
    std::vector<double> stderr_;  // matching standard errors
};

// Empirical Gram of the normalized template polynomials under the null.
GramCheck mc_gram_null(const TemplateCatalog& catalog, long long n, long long d,
                       long long replicates, std::uint64_t seed,
                       long long labeling_budget = 100'000);

}  // namespace plantedrank
