#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epiwelfare::ethics {

/// Finite, nonempty vector of lifetime well-being levels.
class Allocation {
 public:
  Allocation() = default;
  /// Throws std::invalid_argument on an empty or non-finite vector.
  explicit Allocation(std::vector<double> levels);
  Allocation(std::initializer_list<double> levels) : Allocation(std::vector<double>(levels)) {}

  const std::vector<double>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  double min() const;
  double max() const;

  /// Non-decreasing reordering x_[1] <= ... <= x_[n].
  std::vector<double> sorted() const;

  /// (x, z): this allocation with one person at level z appended.
  Allocation with(double z) const;
  /// (x, y): concatenation.
  Allocation concat(const Allocation& other) const;

  static Allocation egalitarian(double level, std::size_t n);

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::vector<double> levels_;
};

/// Continuous, strictly increasing map from well-being to utility.
struct UtilityTransform {
  enum class Kind { Identity, PowerConcave, Tabulated };

  Kind kind = Kind::Identity;
  /// PowerConcave: u(x) = ((1 + x)^eta - 1) / eta for x >= 0 and u(x) = x below.
  double eta = 0.5;
  /// Tabulated: strictly increasing knots (x, u), linear in between and
  /// extrapolated with the end slopes.
  std::vector<std::pair<double, double>> table;

  static UtilityTransform identity() { return {}; }
  static UtilityTransform power(double eta);
  static UtilityTransform tabulated(std::vector<std::pair<double, double>> knots);

  double operator()(double x) const;
  void validate() const;
  std::string label() const;

  friend bool operator==(const UtilityTransform&, const UtilityTransform&) = default;
};

enum class CriterionKind { CU, TU, CLU, AU, RDCLU };

struct WelfareCriterion {
  CriterionKind kind = CriterionKind::CU;
  double c = 0.0;              // critical level (CLU, RDCLU)
  double rank_discount = 0.5;  // RDCLU geometric rank weight
  UtilityTransform u;

  static WelfareCriterion cu() { return {CriterionKind::CU, 0.0, 0.5, {}}; }
  static WelfareCriterion tu() { return {CriterionKind::TU, 0.0, 0.5, {}}; }
  static WelfareCriterion clu(double c) { return {CriterionKind::CLU, c, 0.5, {}}; }
  static WelfareCriterion au() { return {CriterionKind::AU, 0.0, 0.5, {}}; }
  static WelfareCriterion rdclu(double rank_discount, double c) {
    return {CriterionKind::RDCLU, c, rank_discount, {}};
  }

  /// Critical level actually used by the value function (0 for CU, TU, AU).
  double critical_level() const;
  void validate() const;
  /// Canonical text form, e.g. "RDCLU(beta=0.9,c=1)"; parse_criterion inverts it.
  std::string label() const;

  friend bool operator==(const WelfareCriterion&, const WelfareCriterion&) = default;
};

/// Parses "CU", "TU", "AU", "CLU(c=1)", "RDCLU(beta=0.9,c=1,u=power:0.5)" or
/// "...,u=table:0/0|1/2|4/3". Throws std::invalid_argument on malformed text.
WelfareCriterion parse_criterion(std::string_view text);

/// Parses a ';'-separated list of criteria.
std::vector<WelfareCriterion> parse_criteria(std::string_view text);

enum class Ordering { StrictlyBetter, Indifferent, StrictlyWorse };

std::string_view to_string(Ordering o);

/// Numerical representation of the social welfare order.
///   CU, TU: sum u(x_i)            CLU: sum (u(x_i) - u(c))
///   AU: mean u(x_i)               RDCLU: sum_r beta^r (u(x_[r]) - u(c))
double criterion_value(const Allocation& x, const WelfareCriterion& crit);

/// Value of n people all at `level`, computed without materialising the
/// allocation. Agrees with criterion_value on Allocation::egalitarian.
double egalitarian_value(double level, std::size_t n, const WelfareCriterion& crit);

/// Compares two welfare values with relative tolerance 1e-12 * max(1, |a|, |b|).
Ordering compare_values(double a, double b);

Ordering compare(const Allocation& x, const Allocation& y, const WelfareCriterion& crit);

/// x is socially at least as good as y.
inline bool weakly_better(const Allocation& x, const Allocation& y, const WelfareCriterion& crit) {
  return compare(x, y, crit) != Ordering::StrictlyWorse;
}

// ---------------------------------------------------------------------------
// Axiom checking

enum class Axiom { A1 = 1, A2, A3, A4, A5, A6, A7, A8 };

std::string_view axiom_name(Axiom a);
/// Accepts "A1".."A8" (case-insensitive). Throws std::invalid_argument otherwise.
Axiom parse_axiom(std::string_view text);

enum class Verdict { Pass, Fail, NotFoundWithinBudget, NotMachineChecked };

std::string_view to_string(Verdict v);

/// Named allocations and scalars that together violate a property.
struct Witness {
  std::vector<std::pair<std::string, Allocation>> allocations;
  std::vector<std::pair<std::string, double>> scalars;

  const Allocation& allocation(std::string_view name) const;
  double scalar(std::string_view name) const;
  /// e.g. "x=(1) y=(0.6,1.5) z=3"
  std::string to_string() const;
};

/// Random allocations: sizes uniform in [1, pop_cap], levels uniform in [lo, hi].
struct Universe {
  std::size_t pop_cap = 8;
  double lo = -10.0;
  double hi = 10.0;

  void validate() const;
};

struct AxiomReport {
  Axiom axiom = Axiom::A1;
  std::string criterion;
  std::size_t samples_tested = 0;
  Verdict verdict = Verdict::Pass;
  std::optional<Witness> witness;
  /// Sample index at which the witness was found.
  std::size_t witness_sample = 0;
  std::uint64_t seed = 0;
  std::string note;
};

/// Randomised counterexample search for one axiom within the sampled
/// universe. Deterministic in (crit, axiom, samples, seed, universe). Fail
/// witnesses are shrunk to simpler values that still violate the axiom.
AxiomReport check_axiom(const WelfareCriterion& crit, Axiom axiom, std::size_t samples,
                        std::uint64_t seed, const Universe& universe = {});

/// Re-evaluates a recorded witness; true when it still violates the axiom.
/// Only defined for axioms whose failures are decidable (all but A2, A7).
bool witness_violates(Axiom axiom, const WelfareCriterion& crit, const Witness& witness);

/// Appending a strictly negative level never yields a strictly better allocation.
AxiomReport check_negative_expansion(const WelfareCriterion& crit, std::size_t samples,
                                     std::uint64_t seed, const Universe& universe = {});

/// Witness for the negative-expansion property: (x, a) strictly better than x with a < 0.
bool negative_expansion_violated(const WelfareCriterion& crit, const Witness& witness);

// ---------------------------------------------------------------------------
// Conclusions

struct RepugnantWitness {
  std::size_t n = 0;        // clones at level epsilon
  double clones_value = 0;  // W((epsilon)_n)
  double base_value = 0;    // W(base)
};

/// Smallest n <= n_max with (epsilon)_n strictly better than `base`.
std::optional<RepugnantWitness> repugnant_witness(const WelfareCriterion& crit,
                                                  const Allocation& base, double epsilon,
                                                  std::size_t n_max);

struct VerySadisticWitness {
  Allocation positive;  // egalitarian, all levels > 0
  Allocation negative;  // egalitarian, all levels < 0
  double positive_value = 0;
  double negative_value = 0;
};

/// Positive probe levels, scanned in this order.
inline constexpr double kSadisticPositiveProbes[] = {0.5, 0.25, 0.1, 1.0, 2.0};
/// Negative probe levels, scanned in this order.
inline constexpr double kSadisticNegativeProbes[] = {-1.0, -0.5, -0.1, -2.0, -5.0};

/// First (p, q, m, k) in probe order with (p)_m strictly worse than (q)_k,
/// m and k ranging over 1..n_max (m outer).
std::optional<VerySadisticWitness> very_sadistic_witness(const WelfareCriterion& crit,
                                                         std::size_t n_max);

// ---------------------------------------------------------------------------
// Property matrix

struct MatrixCell {
  std::string criterion;
  std::string property;
  Verdict verdict = Verdict::Pass;
  std::string witness;
  /// Checkmark from the reference table of principles, when that table has a row
  /// for this criterion and a column for this property.
  std::optional<bool> tabulated;
};

struct MatrixOptions {
  std::size_t budget = 1000;  // random samples per randomized cell
  std::uint64_t seed = 1;
  Universe universe;
  double repugnant_base = 100.0;
  double repugnant_epsilon = 0.1;
  std::size_t repugnant_n_max = 100000;
};

std::vector<MatrixCell> property_matrix(const std::vector<WelfareCriterion>& criteria,
                                        const MatrixOptions& options = {});

}  // namespace epiwelfare::ethics
