#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "epiwelfare/ethics.hpp"
#include "epiwelfare/format.hpp"

namespace epiwelfare::ethics {

std::string_view axiom_name(Axiom a) {
  switch (a) {
    case Axiom::A1: return "A1 order";
    case Axiom::A2: return "A2 continuity (proxy)";
    case Axiom::A3: return "A3 Suppes-Sen";
    case Axiom::A4: return "A4 existence independence of the best off";
    case Axiom::A5: return "A5 existence independence of the worst off";
    case Axiom::A6: return "A6 existence of a critical level";
    case Axiom::A7: return "A7 existence of egalitarian equivalence";
    case Axiom::A8: return "A8 same-number independence";
  }
  return "?";
}

Axiom parse_axiom(std::string_view text) {
  text = trim(text);
  if (text.size() == 2 && (text[0] == 'A' || text[0] == 'a') && text[1] >= '1' && text[1] <= '8') {
    return static_cast<Axiom>(text[1] - '0');
  }
  throw std::invalid_argument("invalid axiom id '" + std::string(text) + "' (expected A1..A8)");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotFoundWithinBudget: return "not-found-within-budget";
    case Verdict::NotMachineChecked: return "not-machine-checked";
  }
  return "?";
}

void Universe::validate() const {
  if (pop_cap < 2) throw std::invalid_argument("pop_cap must be >= 2");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("universe needs finite lo < hi");
  }
}

const Allocation& Witness::allocation(std::string_view name) const {
  for (const auto& [n, a] : allocations) {
    if (n == name) return a;
  }
  throw std::out_of_range("witness has no allocation '" + std::string(name) + "'");
}

double Witness::scalar(std::string_view name) const {
  for (const auto& [n, v] : scalars) {
    if (n == name) return v;
  }
  throw std::out_of_range("witness has no scalar '" + std::string(name) + "'");
}

std::string Witness::to_string() const {
  std::string s;
  for (const auto& [name, a] : allocations) {
    if (!s.empty()) s += ' ';
    s += name + "=(";
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k) s += ',';
      s += format_exact(a.levels()[k]);
    }
    s += ')';
  }
  for (const auto& [name, v] : scalars) {
    if (!s.empty()) s += ' ';
    s += name + "=" + format_exact(v);
  }
  return s;
}

namespace {

class Sampler {
 public:
  Sampler(std::uint64_t seed, const Universe& u) : rng_(seed), universe_(u) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  std::size_t size() { return std::uniform_int_distribution<std::size_t>(1, universe_.pop_cap)(rng_); }
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  Allocation allocation(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return Allocation(std::move(v));
  }
  Allocation allocation(std::size_t n) { return allocation(n, universe_.lo, universe_.hi); }
  Allocation allocation() { return allocation(size()); }

  std::vector<double> shuffled(std::vector<double> v) {
    std::shuffle(v.begin(), v.end(), rng_);
    return v;
  }

  double span() const { return universe_.hi - universe_.lo; }
  const Universe& universe() const { return universe_; }

 private:
  std::mt19937_64 rng_;
  Universe universe_;
};

// A decidable property: how to draw an instance, when an instance is admissible
// (the axiom's hypotheses hold) and when it violates the property.
struct Property {
  std::function<Witness(Sampler&, const WelfareCriterion&)> draw;
  std::function<bool(const Witness&, const WelfareCriterion&)> admissible;
  std::function<bool(const Witness&, const WelfareCriterion&)> violated;
  // Allocations that must keep equal sizes while shrinking; removal happens
  // jointly at the same (sorted, if `sorted_removal`) position.
  std::vector<std::vector<std::string>> coupled;
  bool sorted_removal = false;
};

bool sorted_dominates(const Allocation& x, const Allocation& y) {
  if (x.size() != y.size()) return false;
  const auto xs = x.sorted();
  const auto ys = y.sorted();
  bool strict = false;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] < ys[k]) return false;
    if (xs[k] > ys[k]) strict = true;
  }
  return strict;
}

bool always(const Witness&, const WelfareCriterion&) { return true; }

Property property_for(Axiom axiom) {
  Property p;
  switch (axiom) {
    case Axiom::A1:
      p.draw = [](Sampler& s, const WelfareCriterion&) {
        return Witness{{{"x", s.allocation()}, {"y", s.allocation()}, {"z", s.allocation()}}, {}};
      };
      p.admissible = always;
      p.violated = [](const Witness& w, const WelfareCriterion& c) {
        const auto& x = w.allocation("x");
        const auto& y = w.allocation("y");
        const auto& z = w.allocation("z");
        if (compare(x, x, c) != Ordering::Indifferent) return true;
        const Ordering xy = compare(x, y, c);
        const Ordering yx = compare(y, x, c);
        const bool mirrored = (xy == Ordering::StrictlyBetter && yx == Ordering::StrictlyWorse) ||
                              (xy == Ordering::StrictlyWorse && yx == Ordering::StrictlyBetter) ||
                              (xy == Ordering::Indifferent && yx == Ordering::Indifferent);
        if (!mirrored) return true;
        return weakly_better(x, y, c) && weakly_better(y, z, c) && !weakly_better(x, z, c);
      };
      break;

    case Axiom::A3:
      p.draw = [](Sampler& s, const WelfareCriterion&) {
        const std::size_t n = s.size();
        const Allocation y = s.allocation(n);
        std::vector<double> x = y.sorted();
        const std::size_t forced = s.index(n);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == forced) x[k] += s.uniform(1e-3, 0.25) * s.span();
          else if (s.coin()) x[k] += s.uniform(0.0, 0.25) * s.span();
        }
        return Witness{{{"x", Allocation(s.shuffled(std::move(x)))}, {"y", y}}, {}};
      };
      p.admissible = [](const Witness& w, const WelfareCriterion&) {
        return sorted_dominates(w.allocation("x"), w.allocation("y"));
      };
      p.violated = [](const Witness& w, const WelfareCriterion& c) {
        return compare(w.allocation("x"), w.allocation("y"), c) != Ordering::StrictlyBetter;
      };
      p.coupled = {{"x", "y"}};
      p.sorted_removal = true;
      break;

    case Axiom::A4:
    case Axiom::A5: {
      const bool best = axiom == Axiom::A4;
      p.draw = [best](Sampler& s, const WelfareCriterion&) {
        const Allocation x = s.allocation();
        const Allocation y = s.allocation();
        const double z = best ? std::max(x.max(), y.max()) + s.uniform(0.0, 0.5) * s.span()
                              : std::min(x.min(), y.min()) - s.uniform(0.0, 0.5) * s.span();
        return Witness{{{"x", x}, {"y", y}}, {{"z", z}}};
      };
      p.admissible = [best](const Witness& w, const WelfareCriterion&) {
        const auto& x = w.allocation("x");
        const auto& y = w.allocation("y");
        const double z = w.scalar("z");
        return best ? z >= std::max(x.max(), y.max()) : z <= std::min(x.min(), y.min());
      };
      p.violated = [](const Witness& w, const WelfareCriterion& c) {
        const auto& x = w.allocation("x");
        const auto& y = w.allocation("y");
        const double z = w.scalar("z");
        return weakly_better(x, y, c) != weakly_better(x.with(z), y.with(z), c);
      };
      break;
    }

    case Axiom::A6:
      // Rank-discounted criteria are only indifferent to a person at c when c
      // is at or above the best off.
      p.draw = [](Sampler& s, const WelfareCriterion& c) {
        const double cl = c.critical_level();
        if (c.kind != CriterionKind::RDCLU) return Witness{{{"x", s.allocation(s.size())}}, {{"c", cl}}};
        const double hi = std::min(s.universe().hi, cl);
        const double lo = std::min(s.universe().lo, hi - s.span());
        return Witness{{{"x", s.allocation(s.size(), lo, hi)}}, {{"c", cl}}};
      };
      p.admissible = [](const Witness& w, const WelfareCriterion& c) {
        if (w.scalar("c") != c.critical_level()) return false;
        return c.kind != CriterionKind::RDCLU || w.allocation("x").max() <= w.scalar("c");
      };
      p.violated = [](const Witness& w, const WelfareCriterion& c) {
        const auto& x = w.allocation("x");
        return compare(x.with(w.scalar("c")), x, c) != Ordering::Indifferent;
      };
      break;

    case Axiom::A8:
      p.draw = [](Sampler& s, const WelfareCriterion&) {
        const std::size_t n = s.size();
        const std::size_t m = s.size();
        return Witness{{{"x", s.allocation(n)}, {"y", s.allocation(n)}, {"u", s.allocation(m)},
                        {"v", s.allocation(m)}},
                       {}};
      };
      p.admissible = [](const Witness& w, const WelfareCriterion&) {
        return w.allocation("x").size() == w.allocation("y").size() &&
               w.allocation("u").size() == w.allocation("v").size();
      };
      p.violated = [](const Witness& w, const WelfareCriterion& c) {
        const auto& x = w.allocation("x");
        const auto& y = w.allocation("y");
        const auto& u = w.allocation("u");
        const auto& v = w.allocation("v");
        return weakly_better(x.concat(u), y.concat(u), c) != weakly_better(x.concat(v), y.concat(v), c);
      };
      p.coupled = {{"x", "y"}, {"u", "v"}};
      break;

    case Axiom::A2:
    case Axiom::A7:
      throw std::logic_error("A2 and A7 have no decidable counterexample");
  }
  return p;
}

Property negative_expansion_property() {
  Property p;
  p.draw = [](Sampler& s, const WelfareCriterion&) {
    const double lo = std::min(s.universe().lo, -1.0);
    return Witness{{{"x", s.allocation()}}, {{"a", s.uniform(lo, 0.0)}}};
  };
  p.admissible = [](const Witness& w, const WelfareCriterion&) { return w.scalar("a") < 0.0; };
  p.violated = [](const Witness& w, const WelfareCriterion& c) {
    const auto& x = w.allocation("x");
    return compare(x.with(w.scalar("a")), x, c) == Ordering::StrictlyBetter;
  };
  return p;
}

// Shrinks a violating instance towards fewer people and rounder numbers while it
// stays admissible and violating.
Witness shrink(Witness w, const Property& p, const WelfareCriterion& crit) {
  auto keeps = [&](const Witness& cand) { return p.admissible(cand, crit) && p.violated(cand, crit); };

  auto coupled_group = [&](const std::string& name) -> std::vector<std::string> {
    for (const auto& g : p.coupled) {
      if (std::find(g.begin(), g.end(), name) != g.end()) return g;
    }
    return {name};
  };

  auto find_alloc = [](Witness& x, const std::string& name) -> Allocation& {
    for (auto& [n, a] : x.allocations) {
      if (n == name) return a;
    }
    throw std::out_of_range(name);
  };

  const auto roundings = std::array<std::function<double(double)>, 6>{
      [](double v) { return std::round(v); },
      [](double v) { return std::floor(v); },
      [](double v) { return std::ceil(v); },
      [](double v) { return std::round(v * 10.0) / 10.0; },
      [](double v) { return std::floor(v * 10.0) / 10.0; },
      [](double v) { return std::ceil(v * 10.0) / 10.0; },
  };

  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;

    // Remove people.
    for (std::size_t a = 0; a < w.allocations.size(); ++a) {
      const std::string name = w.allocations[a].first;
      const auto group = coupled_group(name);
      if (group.front() != name) continue;
      for (std::size_t k = 0; k < w.allocations[a].second.size(); ++k) {
        if (w.allocations[a].second.size() <= 1) break;
        Witness cand = w;
        for (const auto& member : group) {
          Allocation& alloc = find_alloc(cand, member);
          std::vector<double> lv = p.sorted_removal ? alloc.sorted() : alloc.levels();
          lv.erase(lv.begin() + static_cast<std::ptrdiff_t>(k));
          alloc = Allocation(std::move(lv));
        }
        if (keeps(cand)) {
          w = std::move(cand);
          changed = true;
          --k;
        }
      }
    }

    // Round levels, then scalars.
    for (std::size_t a = 0; a < w.allocations.size(); ++a) {
      for (std::size_t k = 0; k < w.allocations[a].second.size(); ++k) {
        for (const auto& r : roundings) {
          const double old = w.allocations[a].second.levels()[k];
          const double rounded = r(old);
          if (rounded == old) break;
          Witness cand = w;
          std::vector<double> lv = cand.allocations[a].second.levels();
          lv[k] = rounded;
          cand.allocations[a].second = Allocation(std::move(lv));
          if (keeps(cand)) {
            w = std::move(cand);
            changed = true;
            break;
          }
        }
      }
    }
    for (std::size_t s = 0; s < w.scalars.size(); ++s) {
      for (const auto& r : roundings) {
        const double old = w.scalars[s].second;
        const double rounded = r(old);
        if (rounded == old) break;
        Witness cand = w;
        cand.scalars[s].second = rounded;
        if (keeps(cand)) {
          w = std::move(cand);
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
  return w;
}

AxiomReport run_property(const Property& p, const WelfareCriterion& crit, std::size_t samples,
                         std::uint64_t seed, const Universe& universe) {
  AxiomReport rep;
  rep.criterion = crit.label();
  rep.seed = seed;
  Sampler sampler(seed, universe);
  for (std::size_t k = 0; k < samples; ++k) {
    Witness inst = p.draw(sampler, crit);
    ++rep.samples_tested;
    if (p.admissible(inst, crit) && p.violated(inst, crit)) {
      rep.verdict = Verdict::Fail;
      rep.witness = shrink(std::move(inst), p, crit);
      rep.witness_sample = k;
      return rep;
    }
  }
  rep.verdict = Verdict::Pass;
  return rep;
}

AxiomReport check_continuity(const WelfareCriterion& crit, std::size_t samples, std::uint64_t seed,
                             const Universe& universe) {
  AxiomReport rep;
  rep.axiom = Axiom::A2;
  rep.criterion = crit.label();
  rep.seed = seed;
  Sampler sampler(seed, universe);
  const double delta = 1e-6 * sampler.span();
  double k_max = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Allocation x = sampler.allocation();
    const std::size_t idx = sampler.index(x.size());
    std::vector<double> lv = x.levels();
    lv[idx] += sampler.coin() ? delta : -delta;
    const Allocation xp(std::move(lv));
    const double quotient = std::abs(criterion_value(xp, crit) - criterion_value(x, crit)) / delta;
    ++rep.samples_tested;
    if (!std::isfinite(quotient)) {
      rep.verdict = Verdict::Fail;
      rep.witness = Witness{{{"x", x}, {"x_perturbed", xp}}, {{"delta", delta}}};
      rep.witness_sample = k;
      rep.note = "proxy: non-finite difference quotient";
      return rep;
    }
    k_max = std::max(k_max, quotient);
  }
  rep.verdict = Verdict::Pass;
  rep.note = "proxy: empirical modulus K=" + format_csv(k_max) + " at delta=" + format_csv(delta);
  return rep;
}

// Looks for z and n <= pop_cap with y < (z)_n < x.
bool egalitarian_between(const Allocation& x, const Allocation& y, const WelfareCriterion& crit,
                         const Universe& universe) {
  const double wx = criterion_value(x, crit);
  const double wy = criterion_value(y, crit);
  const double target = 0.5 * (wx + wy);
  const double span = universe.hi - universe.lo;
  for (std::size_t n = 1; n <= universe.pop_cap; ++n) {
    double lo = std::min({x.min(), y.min(), universe.lo}) - 10.0 * span;
    double hi = std::max({x.max(), y.max(), universe.hi}) + 10.0 * span;
    if (egalitarian_value(lo, n, crit) > target || egalitarian_value(hi, n, crit) < target) continue;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (egalitarian_value(mid, n, crit) < target) lo = mid;
      else hi = mid;
    }
    const Allocation e = Allocation::egalitarian(0.5 * (lo + hi), n);
    if (compare(x, e, crit) == Ordering::StrictlyBetter && compare(e, y, crit) == Ordering::StrictlyBetter) {
      return true;
    }
  }
  return false;
}

AxiomReport check_egalitarian_equivalence(const WelfareCriterion& crit, std::size_t samples,
                                          std::uint64_t seed, const Universe& universe) {
  AxiomReport rep;
  rep.axiom = Axiom::A7;
  rep.criterion = crit.label();
  rep.seed = seed;
  Sampler sampler(seed, universe);
  for (std::size_t k = 0; k < samples; ++k) {
    Allocation x = sampler.allocation();
    Allocation y = sampler.allocation();
    ++rep.samples_tested;
    const Ordering o = compare(x, y, crit);
    if (o == Ordering::Indifferent) continue;
    if (o == Ordering::StrictlyWorse) std::swap(x, y);
    if (!egalitarian_between(x, y, crit, universe)) {
      rep.verdict = Verdict::NotFoundWithinBudget;
      rep.witness = Witness{{{"x", x}, {"y", y}}, {}};
      rep.witness_sample = k;
      rep.note = "no egalitarian (z)_n strictly between x and y with n <= pop_cap";
      return rep;
    }
  }
  rep.verdict = Verdict::Pass;
  rep.note = "egalitarian equivalent found for every strictly ranked pair, n <= pop_cap";
  return rep;
}

}  // namespace

AxiomReport check_axiom(const WelfareCriterion& crit, Axiom axiom, std::size_t samples,
                        std::uint64_t seed, const Universe& universe) {
  crit.validate();
  universe.validate();
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const int id = static_cast<int>(axiom);
  if (id < 1 || id > 8) throw std::invalid_argument("invalid axiom id");

  AxiomReport rep;
  if (axiom == Axiom::A2) {
    rep = check_continuity(crit, samples, seed, universe);
  } else if (axiom == Axiom::A7) {
    rep = check_egalitarian_equivalence(crit, samples, seed, universe);
  } else {
    rep = run_property(property_for(axiom), crit, samples, seed, universe);
    if (axiom == Axiom::A6) {
      rep.note = "tested at c=" + format_exact(crit.critical_level());
      if (crit.kind == CriterionKind::RDCLU) rep.note += " with max(x) <= c";
    }
  }
  rep.axiom = axiom;
  return rep;
}

bool witness_violates(Axiom axiom, const WelfareCriterion& crit, const Witness& witness) {
  const Property p = property_for(axiom);
  return p.admissible(witness, crit) && p.violated(witness, crit);
}

AxiomReport check_negative_expansion(const WelfareCriterion& crit, std::size_t samples,
                                     std::uint64_t seed, const Universe& universe) {
  crit.validate();
  universe.validate();
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  return run_property(negative_expansion_property(), crit, samples, seed, universe);
}

bool negative_expansion_violated(const WelfareCriterion& crit, const Witness& witness) {
  const Property p = negative_expansion_property();
  return p.admissible(witness, crit) && p.violated(witness, crit);
}

// ---------------------------------------------------------------------------
// Property matrix

namespace {

struct TableRow {
  bool utility_independence, existence_independence, negative_expansion, avoids_repugnant,
      priority_lives_worth_living;
};

// Rows of the reference table of principles for the criteria implemented here.
std::optional<TableRow> tabulated_row(const WelfareCriterion& crit) {
  switch (crit.kind) {
    case CriterionKind::CU:
    case CriterionKind::TU:
      return TableRow{true, true, true, true, false};
    case CriterionKind::CLU:
      if (crit.c > 0.0) return TableRow{true, true, true, true, false};
      return std::nullopt;
    case CriterionKind::AU:
      return TableRow{false, false, false, true, true};
    case CriterionKind::RDCLU:
      return TableRow{false, false, true, true, true};
  }
  return std::nullopt;
}

}  // namespace

std::vector<MatrixCell> property_matrix(const std::vector<WelfareCriterion>& criteria,
                                        const MatrixOptions& options) {
  if (options.budget < 1) throw std::invalid_argument("budget must be >= 1");
  std::vector<MatrixCell> cells;
  for (const auto& crit : criteria) {
    crit.validate();
    const std::string label = crit.label();
    const auto row = tabulated_row(crit);
    auto tab = [&](bool TableRow::*field) -> std::optional<bool> {
      if (!row) return std::nullopt;
      return (*row).*field;
    };
    auto from_report = [&](const std::string& property, const AxiomReport& rep,
                           std::optional<bool> tabulated) {
      cells.push_back({label, property, rep.verdict, rep.witness ? rep.witness->to_string() : "",
                       tabulated});
    };

    cells.push_back({label, "utility_independence", Verdict::NotMachineChecked, "",
                     tab(&TableRow::utility_independence)});
    from_report("existence_independence_best_off",
                check_axiom(crit, Axiom::A4, options.budget, options.seed, options.universe),
                std::nullopt);
    from_report("existence_independence_worst_off",
                check_axiom(crit, Axiom::A5, options.budget, options.seed, options.universe),
                std::nullopt);
    from_report("same_number_independence",
                check_axiom(crit, Axiom::A8, options.budget, options.seed, options.universe),
                std::nullopt);
    from_report("negative_expansion",
                check_negative_expansion(crit, options.budget, options.seed, options.universe),
                tab(&TableRow::negative_expansion));

    const Allocation base{options.repugnant_base};
    const auto rc = repugnant_witness(crit, base, options.repugnant_epsilon, options.repugnant_n_max);
    MatrixCell cell{label, "avoid_repugnant_conclusion", rc ? Verdict::Fail : Verdict::Pass, "",
                    tab(&TableRow::avoids_repugnant)};
    if (rc) {
      cell.witness = "base=(" + format_exact(options.repugnant_base) +
                     ") clones=" + format_exact(options.repugnant_epsilon) + "x" + std::to_string(rc->n);
    }
    cells.push_back(cell);

    cells.push_back({label, "priority_lives_worth_living", Verdict::NotMachineChecked, "",
                     tab(&TableRow::priority_lives_worth_living)});
  }
  return cells;
}

}  // namespace epiwelfare::ethics
