#include "epiwelfare/ethics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "epiwelfare/format.hpp"

namespace epiwelfare::ethics {

// ---------------------------------------------------------------------------
// Allocation

Allocation::Allocation(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("allocation must be nonempty");
  for (double v : levels_) {
    if (!std::isfinite(v)) throw std::invalid_argument("allocation levels must be finite");
  }
}

double Allocation::min() const { return *std::min_element(levels_.begin(), levels_.end()); }
double Allocation::max() const { return *std::max_element(levels_.begin(), levels_.end()); }

std::vector<double> Allocation::sorted() const {
  std::vector<double> s = levels_;
  std::sort(s.begin(), s.end());
  return s;
}

Allocation Allocation::with(double z) const {
  std::vector<double> v = levels_;
  v.push_back(z);
  return Allocation(std::move(v));
}

Allocation Allocation::concat(const Allocation& other) const {
  std::vector<double> v = levels_;
  v.insert(v.end(), other.levels_.begin(), other.levels_.end());
  return Allocation(std::move(v));
}

Allocation Allocation::egalitarian(double level, std::size_t n) {
  return Allocation(std::vector<double>(n, level));
}

// ---------------------------------------------------------------------------
// Utility transforms

UtilityTransform UtilityTransform::power(double eta) {
  UtilityTransform u;
  u.kind = Kind::PowerConcave;
  u.eta = eta;
  u.validate();
  return u;
}

UtilityTransform UtilityTransform::tabulated(std::vector<std::pair<double, double>> knots) {
  UtilityTransform u;
  u.kind = Kind::Tabulated;
  u.table = std::move(knots);
  u.validate();
  return u;
}

void UtilityTransform::validate() const {
  switch (kind) {
    case Kind::Identity:
      return;
    case Kind::PowerConcave:
      if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("power transform needs eta in (0, 1)");
      return;
    case Kind::Tabulated:
      if (table.size() < 2) throw std::invalid_argument("tabulated transform needs >= 2 knots");
      for (std::size_t k = 1; k < table.size(); ++k) {
        if (!(table[k].first > table[k - 1].first && table[k].second > table[k - 1].second)) {
          throw std::invalid_argument("tabulated transform must be strictly increasing");
        }
      }
      return;
  }
}

double UtilityTransform::operator()(double x) const {
  switch (kind) {
    case Kind::Identity:
      return x;
    case Kind::PowerConcave:
      return x >= 0.0 ? (std::pow(1.0 + x, eta) - 1.0) / eta : x;
    case Kind::Tabulated: {
      auto seg = std::upper_bound(table.begin(), table.end(), x,
                                  [](double v, const auto& knot) { return v < knot.first; });
      std::size_t hi = static_cast<std::size_t>(seg - table.begin());
      hi = std::clamp<std::size_t>(hi, 1, table.size() - 1);
      const auto& [x0, u0] = table[hi - 1];
      const auto& [x1, u1] = table[hi];
      return u0 + (u1 - u0) * (x - x0) / (x1 - x0);
    }
  }
  return x;
}

std::string UtilityTransform::label() const {
  switch (kind) {
    case Kind::Identity:
      return "identity";
    case Kind::PowerConcave:
      return "power:" + format_exact(eta);
    case Kind::Tabulated: {
      std::string s = "table:";
      for (std::size_t k = 0; k < table.size(); ++k) {
        if (k) s += '|';
        s += format_exact(table[k].first) + "/" + format_exact(table[k].second);
      }
      return s;
    }
  }
  return "identity";
}

// ---------------------------------------------------------------------------
// Criteria

double WelfareCriterion::critical_level() const {
  return (kind == CriterionKind::CLU || kind == CriterionKind::RDCLU) ? c : 0.0;
}

void WelfareCriterion::validate() const {
  if (!(std::isfinite(c) && c >= 0.0)) throw std::invalid_argument("critical level c must be >= 0");
  if (!(rank_discount > 0.0 && rank_discount < 1.0)) {
    throw std::invalid_argument("rank discount must lie in (0, 1)");
  }
  if ((kind == CriterionKind::CU || kind == CriterionKind::TU || kind == CriterionKind::AU) && c != 0.0) {
    throw std::invalid_argument("CU, TU and AU take no critical level");
  }
  u.validate();
}

namespace {

std::string_view kind_name(CriterionKind k) {
  switch (k) {
    case CriterionKind::CU: return "CU";
    case CriterionKind::TU: return "TU";
    case CriterionKind::CLU: return "CLU";
    case CriterionKind::AU: return "AU";
    case CriterionKind::RDCLU: return "RDCLU";
  }
  return "?";
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

UtilityTransform parse_transform(std::string_view text) {
  text = trim(text);
  if (text == "identity") return UtilityTransform::identity();
  if (text.starts_with("power:")) return UtilityTransform::power(parse_double(text.substr(6)));
  if (text.starts_with("table:")) {
    std::vector<std::pair<double, double>> knots;
    for (auto knot : split(text.substr(6), '|')) {
      const auto xy = split(knot, '/');
      if (xy.size() != 2) throw std::invalid_argument("table knot must be x/u: '" + std::string(knot) + "'");
      knots.emplace_back(parse_double(xy[0]), parse_double(xy[1]));
    }
    return UtilityTransform::tabulated(std::move(knots));
  }
  throw std::invalid_argument("unknown utility transform '" + std::string(text) + "'");
}

}  // namespace

std::string WelfareCriterion::label() const {
  std::string args;
  auto add = [&](const std::string& kv) {
    if (!args.empty()) args += ',';
    args += kv;
  };
  if (kind == CriterionKind::RDCLU) add("beta=" + format_exact(rank_discount));
  if (kind == CriterionKind::CLU || kind == CriterionKind::RDCLU) add("c=" + format_exact(c));
  if (u.kind != UtilityTransform::Kind::Identity) add("u=" + u.label());
  std::string s(kind_name(kind));
  if (!args.empty()) s += "(" + args + ")";
  return s;
}

WelfareCriterion parse_criterion(std::string_view text) {
  text = trim(text);
  const auto open = text.find('(');
  const std::string name = upper(trim(text.substr(0, open)));

  WelfareCriterion crit;
  if (name == "CU") crit.kind = CriterionKind::CU;
  else if (name == "TU") crit.kind = CriterionKind::TU;
  else if (name == "CLU") crit.kind = CriterionKind::CLU;
  else if (name == "AU") crit.kind = CriterionKind::AU;
  else if (name == "RDCLU") crit.kind = CriterionKind::RDCLU;
  else throw std::invalid_argument("unknown criterion '" + name + "'");

  if (open != std::string_view::npos) {
    if (!text.ends_with(")")) throw std::invalid_argument("criterion arguments must end with ')'");
    const auto body = text.substr(open + 1, text.size() - open - 2);
    for (auto arg : split(body, ',')) {
      arg = trim(arg);
      if (arg.empty()) continue;
      const auto eq = arg.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("criterion argument needs key=value");
      const auto key = trim(arg.substr(0, eq));
      const auto val = arg.substr(eq + 1);
      if (key == "c") crit.c = parse_double(val);
      else if (key == "beta") crit.rank_discount = parse_double(val);
      else if (key == "u") crit.u = parse_transform(val);
      else throw std::invalid_argument("unknown criterion argument '" + std::string(key) + "'");
    }
  }
  crit.validate();
  return crit;
}

std::vector<WelfareCriterion> parse_criteria(std::string_view text) {
  std::vector<WelfareCriterion> out;
  for (auto part : split(text, ';')) {
    if (!trim(part).empty()) out.push_back(parse_criterion(part));
  }
  return out;
}

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::StrictlyBetter: return "StrictlyBetter";
    case Ordering::Indifferent: return "Indifferent";
    case Ordering::StrictlyWorse: return "StrictlyWorse";
  }
  return "?";
}

double criterion_value(const Allocation& x, const WelfareCriterion& crit) {
  if (x.size() == 0) throw std::invalid_argument("empty allocation");
  const std::vector<double> s = x.sorted();
  const double uc = crit.u(crit.critical_level());
  double total = 0.0;
  switch (crit.kind) {
    case CriterionKind::CU:
    case CriterionKind::TU:
      for (double v : s) total += crit.u(v);
      return total;
    case CriterionKind::CLU:
      for (double v : s) total += crit.u(v) - uc;
      return total;
    case CriterionKind::AU:
      for (double v : s) total += crit.u(v);
      return total / static_cast<double>(s.size());
    case CriterionKind::RDCLU: {
      double weight = 1.0;
      for (double v : s) {
        weight *= crit.rank_discount;
        total += weight * (crit.u(v) - uc);
      }
      return total;
    }
  }
  return total;
}

double egalitarian_value(double level, std::size_t n, const WelfareCriterion& crit) {
  if (n == 0) throw std::invalid_argument("empty allocation");
  const double gain = crit.u(level) - crit.u(crit.critical_level());
  const double count = static_cast<double>(n);
  switch (crit.kind) {
    case CriterionKind::CU:
    case CriterionKind::TU:
    case CriterionKind::CLU:
      return count * gain;
    case CriterionKind::AU:
      return crit.u(level);
    case CriterionKind::RDCLU: {
      const double b = crit.rank_discount;
      return gain * b * (1.0 - std::pow(b, count)) / (1.0 - b);
    }
  }
  return 0.0;
}

Ordering compare_values(double a, double b) {
  const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  if (a - b > tol) return Ordering::StrictlyBetter;
  if (b - a > tol) return Ordering::StrictlyWorse;
  return Ordering::Indifferent;
}

Ordering compare(const Allocation& x, const Allocation& y, const WelfareCriterion& crit) {
  return compare_values(criterion_value(x, crit), criterion_value(y, crit));
}

// ---------------------------------------------------------------------------
// Conclusions

std::optional<RepugnantWitness> repugnant_witness(const WelfareCriterion& crit,
                                                  const Allocation& base, double epsilon,
                                                  std::size_t n_max) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(base.min() > epsilon)) throw std::invalid_argument("every base level must exceed epsilon");
  const double base_value = criterion_value(base, crit);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double v = egalitarian_value(epsilon, n, crit);
    if (compare_values(v, base_value) == Ordering::StrictlyBetter) {
      return RepugnantWitness{n, v, base_value};
    }
  }
  return std::nullopt;
}

std::optional<VerySadisticWitness> very_sadistic_witness(const WelfareCriterion& crit,
                                                         std::size_t n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  for (double p : kSadisticPositiveProbes) {
    for (double q : kSadisticNegativeProbes) {
      for (std::size_t m = 1; m <= n_max; ++m) {
        const double vp = egalitarian_value(p, m, crit);
        for (std::size_t k = 1; k <= n_max; ++k) {
          const double vq = egalitarian_value(q, k, crit);
          if (compare_values(vp, vq) == Ordering::StrictlyWorse) {
            return VerySadisticWitness{Allocation::egalitarian(p, m), Allocation::egalitarian(q, k), vp, vq};
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace epiwelfare::ethics
