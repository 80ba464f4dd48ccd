#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "palette/combine.hpp"

namespace palette::verify {

// ---------------------------------------------------------------------------
// Total-probability factorizations and the CMI-minimizing couple weights.

/// One single-attribute-pair factorization setup:
///   pZ = lambda_i * p_i + lambda_i' * (1 - p_i)   (and the same for j)
/// where p is the attribute's probability of the token and lambda the
/// conditional p(Z=x | event). Instances built by random() satisfy both
/// identities by construction.
struct FactorizationInstance {
    double p_i = 0.5, p_j = 0.5;
    double lambda_i = 0.5, lambda_i_comp = 0.5;
    double lambda_j = 0.5, lambda_j_comp = 0.5;
    double p_z = 0.5;

    static FactorizationInstance random(std::mt19937_64& rng);

    /// Max of the two single-factorization residuals.
    double consistency_residual() const;
};

/// The four couple weights lambda_ab = lambda_a * lambda_b / pZ obtained by
/// driving the conditional mutual information of the pair to zero.
struct CoupleLambdas {
    double ij, i_comp_j_comp, ij_comp, i_comp_j;
};

/// Throws Errc::degenerate_instance when pZ is not bounded away from zero.
CoupleLambdas lambda_from_cmi_min(const FactorizationInstance& inst);

struct FactorizationResiduals {
    double single_i;  ///< |pZ - (li*pi + li'*(1-pi))|
    double single_j;
    double couple;    ///< |pZ - four-event expansion with CMI-minimizing weights|
};

FactorizationResiduals check_factorization(const FactorizationInstance& inst);

// ---------------------------------------------------------------------------
// Conditional mutual information on explicit finite joints.

/// Dense joint tensor p(a_i, a_j, z) over finite supports. Entries must be
/// nonnegative and sum to 1 within 1e-12.
class JointSpace {
public:
    JointSpace(int na, int nb, int nz, std::vector<double> probs);

    int na() const { return na_; }
    int nb() const { return nb_; }
    int nz() const { return nz_; }
    double p(int a, int b, int z) const {
        return probs_[static_cast<size_t>((a * nb_ + b) * nz_ + z)];
    }

    static JointSpace random(std::mt19937_64& rng, int na, int nb, int nz);

    /// Joint with p(a,b|z) = p(a|z)p(b|z) for every z; its CMI is zero.
    static JointSpace conditionally_independent(std::mt19937_64& rng, int na, int nb, int nz);

    /// Binary-z joint built so that p(z=0|a,b) * p(z=0) = p(z=0|a) * p(z=0|b)
    /// for every (a, b): the per-outcome equality that minimizes the CMI
    /// contribution of outcome 0.
    static JointSpace product_outcome(std::mt19937_64& rng, int na, int nb);

private:
    int na_, nb_, nz_;
    std::vector<double> probs_;
};

/// I(A_i; A_j | Z) by direct summation, with 0 * log(0/q) taken as 0.
double cmi(const JointSpace& joint);

/// The z-slice of the CMI sum: p(z) * KL(p(a,b|z) || p(a|z)p(b|z)).
double cmi_outcome_contribution(const JointSpace& joint, int z);

// ---------------------------------------------------------------------------
// Jensen / convexity of the log.

/// log(ax+by) - log(a+b) - [a/(a+b)] log x - [b/(a+b)] log y; >= 0 for
/// positive a, b and x, y in (0, 1].
double convexity_gap(double a, double b, double x, double y);

/// n-term generalization: log(sum a_k x_k) - log(sum a_k) - sum (a_k/A) log x_k.
double jensen_gap(std::span<const double> coeffs, std::span<const double> values);

// ---------------------------------------------------------------------------
// The n-attribute derivation: pairwise-traversal coefficients and the
// Cauchy-based simplification bounds.

/// n attributes sharing one pZ, each with a consistent single factorization.
struct DerivationInstance {
    struct Attr {
        double p;            ///< p(A_i = x)
        double lambda;       ///< p(Z=x | A_i = x)
        double lambda_comp;  ///< p(Z=x | A_i != x)
    };
    double p_z = 0.5;
    std::vector<Attr> attrs;

    static DerivationInstance random(std::mt19937_64& rng, int n);

    int n() const { return static_cast<int>(attrs.size()); }
    double pairs() const { return 0.5 * double(n()) * double(n() - 1); }  // C(n,2)
    double posterior(int i) const;         ///< p(A_i = x | Z = x), by Bayes
    double posterior_comp(int i) const;    ///< p(A_i != x | Z = x)
    double lambda_sum_others(int i) const; ///< sum_{j != i} (lambda_j + lambda_j')

    /// Pairwise-traversal coefficients on log p(A_i = x) / log p(A_i != x).
    double phi(int i) const;
    double omega(int i) const;

    /// The simplified forms with the posterior product condensed to
    /// (n-1) * lambda, which exposes the 1 + 1/p kernel.
    double phi_simplified(int i) const;
    double omega_simplified(int i) const;

    /// Couple factorization coefficients for the pair (i, j).
    double alpha(int i, int j) const;  ///< lambda_i + lambda_ij + lambda_ij'
    double beta(int i, int j) const;   ///< lambda_i' + lambda_i'j + lambda_i'j'
};

struct BoundCheckReport {
    bool upper_ok = true;        ///< post_i * S_i <= 2(n-1) * post_i for all i
    bool lower_ok = true;        ///< post_i * S_i >= (n-1) * post_i for all i
    double min_lower_slack = 0;  ///< min_i (mid - lower); negative on violation
    double min_upper_slack = 0;  ///< min_i (upper - mid)
    double max_phi_rel_err = 0;  ///< worst |phi - phi_simplified| / |phi|
    double max_omega_rel_err = 0;
};

BoundCheckReport simplification_bound_check(const DerivationInstance& inst);

// ---------------------------------------------------------------------------
// Monotonicity and enhancement primitives.

/// p_v^{c(p_v)} / p_k^{c(p_k)} with the mode's exponent; < 1 whenever
/// p_k > p_v. Computed via logs, so extreme inputs only underflow.
double p_ratio(double p_k, double p_v, CombineMode mode);
double log_p_ratio(double p_k, double p_v, CombineMode mode);

struct EnhancementReport {
    double p_attr, p_v, s;
    CombineMode mode;
    double gap_ours;    ///< s * [c(p_attr) log p_attr - c(p_v) log p_v]
    double gap_linear;  ///< s * [log p_attr - log p_v]
    double p_vk;        ///< p_ratio(p_attr, p_v, mode)
};

/// Requires p_attr > p_v, both in (0, 1), s > 0.
EnhancementReport enhancement_gaps(double p_attr, double p_v, double s, CombineMode mode);

/// The gap-difference kernel: exact f(x) = log(x)/x - log(x), sigmoid
/// f(x) = (2 + e^{-x}) log(x) - log(x). Both increase on (0, 1).
double gap_kernel(double x, CombineMode mode);

struct FMonotoneReport {
    int points = 0;
    int violations = 0;
    double min_forward_diff = 0.0;
    bool all_increasing() const { return violations == 0; }
};

/// Forward differences of gap_kernel on a uniform grid of n interior points.
FMonotoneReport f_monotone_check(CombineMode mode, int n_points);

/// Strength-monotonicity scenario: fixed base, fixed companion attributes,
/// one swept attribute whose argmax token is watched. Combined in canonical
/// scale with t = 0.
struct CorrelationScenario {
    TokenDistribution base;
    std::vector<AttributeTerm> attributes;
    size_t swept = 0;
    int32_t x_attr = 0;
    CombineMode mode = CombineMode::exact;

    /// Random scenario: vocab size in [2, max_vocab], 1..max_attrs
    /// attributes, swept attribute main-signed with x_attr its strict argmax.
    static CorrelationScenario random(std::mt19937_64& rng, int max_vocab, int max_attrs,
                                      CombineMode mode);
};

struct MonotonicityReport {
    std::vector<double> s_values;
    std::vector<double> probs;  ///< p(Z = x_attr) per grid point
    double min_step = 0.0;      ///< most negative consecutive difference
    bool nondecreasing = false; ///< min_step >= -1e-9
};

/// Throws Errc::invalid_scenario when x_attr is not the swept attribute's
/// strict argmax.
MonotonicityReport sweep_positive_correlation(const CorrelationScenario& scenario,
                                              std::span<const double> s_grid);

// ---------------------------------------------------------------------------
// The claim suite (backs `verify` in the CLI and the acceptance tests).

struct SuiteParams {
    uint64_t seed = 20240611;
    int cmi_random_joints = 10000;
    int cmi_independent_joints = 200;
    int factorization_instances = 1000;
    int product_outcome_joints = 200;
    int convexity_draws = 100000;
    int bound_instances = 10000;       ///< split across n in {2, 3, 4}
    int ratio_grid = 1000;             ///< p grid resolution per axis
    int enhancement_pairs = 100000;
    int kernel_grid = 10000;
    int monotonicity_scenarios = 200;
    int monotonicity_grid = 10;
};

struct ClaimResult {
    std::string name;
    bool pass = false;
    bool hard = true;  ///< informational claims never fail the suite
    std::string detail;
};

std::vector<ClaimResult> run_verification_suite(const SuiteParams& params = {});

/// True when every hard claim passed.
bool suite_passed(std::span<const ClaimResult> results);

}  // namespace palette::verify
