#include "treeinv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "treeinv/io.hpp"

namespace treeinv {

void SampleSet::validate() const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw std::invalid_argument("sample " + statistic + ": non-finite value at replicate " + std::to_string(i));
}

namespace {

struct PowerSums {
  long double n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;

  void add(long double x) {
    const long double x2 = x * x;
    n += 1;
    s1 += x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x2 * x2;
  }
  PowerSums minus(const PowerSums& o) const { return {n - o.n, s1 - o.s1, s2 - o.s2, s3 - o.s3, s4 - o.s4}; }
};

// k-statistics of data shifted by `shift` (k_2..k_4 are shift invariant).
std::array<double, 4> kstats_from_sums(const PowerSums& p, long double shift) {
  const long double n = p.n, s1 = p.s1, s2 = p.s2, s3 = p.s3, s4 = p.s4;
  std::array<double, 4> k{};
  k[0] = static_cast<double>(s1 / n + shift);
  if (n > 1) k[1] = static_cast<double>((n * s2 - s1 * s1) / (n * (n - 1)));
  if (n > 2) k[2] = static_cast<double>((2 * s1 * s1 * s1 - 3 * n * s1 * s2 + n * n * s3) / (n * (n - 1) * (n - 2)));
  if (n > 3)
    k[3] = static_cast<double>((-6 * s1 * s1 * s1 * s1 + 12 * n * s1 * s1 * s2 - 3 * n * (n - 1) * s2 * s2 -
                                4 * n * (n + 1) * s1 * s3 + n * n * (n + 1) * s4) /
                               (n * (n - 1) * (n - 2) * (n - 3)));
  return k;
}

void require_nonempty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("sample comparison needs nonempty samples");
}

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sample");
  long double s = 0;
  for (const double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance needs at least two values");
  const double m = mean(x);
  long double s = 0;
  for (const double v : x) s += (v - m) * (v - m);
  return static_cast<double>(s / static_cast<long double>(x.size() - 1));
}

std::array<double, 4> k_statistics_point(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("k-statistics of an empty sample");
  const double m = mean(x);
  PowerSums p;
  for (const double v : x) p.add(static_cast<long double>(v) - m);
  return kstats_from_sums(p, m);
}

std::vector<Estimate> k_statistics(std::span<const double> x, int order, int blocks) {
  if (order < 1 || order > 4) throw std::invalid_argument("k-statistics: order must be in 1..4");
  if (x.size() < 10) throw std::invalid_argument("k-statistics: need at least 10 values");
  const double m = mean(x);
  const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(std::max(blocks, 2)), x.size());
  std::vector<PowerSums> block(nb);
  PowerSums total;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double v = static_cast<long double>(x[i]) - m;
    block[i * nb / x.size()].add(v);
    total.add(v);
  }
  const auto full = kstats_from_sums(total, m);
  std::vector<std::array<double, 4>> loo(nb);
  std::array<double, 4> avg{};
  for (std::size_t b = 0; b < nb; ++b) {
    loo[b] = kstats_from_sums(total.minus(block[b]), m);
    for (int k = 0; k < 4; ++k) avg[k] += loo[b][k] / static_cast<double>(nb);
  }
  std::vector<Estimate> out(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    long double ss = 0;
    for (std::size_t b = 0; b < nb; ++b) ss += (loo[b][k] - avg[k]) * (loo[b][k] - avg[k]);
    out[k] = {full[k], static_cast<double>(std::sqrt(ss * (nb - 1) / nb))};
  }
  return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b);
  const auto x = sorted_copy(a), y = sorted_copy(b);
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double d2_estimate(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b);
  const auto x = sorted_copy(a), y = sorted_copy(b);
  // Walk the merged quantile breakpoints i/|x| and j/|y|; on each piece both quantile
  // functions are constant.
  const std::size_t nx = x.size(), ny = y.size();
  std::size_t i = 0, j = 0;
  long double acc = 0;
  long double u = 0;
  while (i < nx && j < ny) {
    const long double ux = static_cast<long double>(i + 1) / nx;
    const long double uy = static_cast<long double>(j + 1) / ny;
    const long double next = std::min(ux, uy);
    const long double d = static_cast<long double>(x[i]) - y[j];
    acc += (next - u) * d * d;
    u = next;
    // Equal sizes hit both breakpoints together; compare as integers to avoid drift.
    const bool adv_x = (i + 1) * ny <= (j + 1) * nx;
    const bool adv_y = (j + 1) * nx <= (i + 1) * ny;
    if (adv_x) ++i;
    if (adv_y) ++j;
  }
  return static_cast<double>(std::sqrt(acc));
}

ChiSquare chi_square_two_sample(const std::map<std::int64_t, std::int64_t>& a,
                                const std::map<std::int64_t, std::int64_t>& b) {
  long double na = 0, nb = 0;
  for (const auto& [k, c] : a) na += c;
  for (const auto& [k, c] : b) nb += c;
  if (na == 0 || nb == 0) throw std::invalid_argument("chi-square: empty sample");
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> joint;
  for (const auto& [k, c] : a) joint[k].first += c;
  for (const auto& [k, c] : b) joint[k].second += c;
  const long double ra = std::sqrt(nb / na), rb = std::sqrt(na / nb);
  ChiSquare out;
  long double stat = 0;
  int cells = 0;
  for (const auto& [k, c] : joint) {
    const long double sum = c.first + c.second;
    if (sum == 0) continue;
    const long double d = ra * c.first - rb * c.second;
    stat += d * d / sum;
    ++cells;
  }
  out.statistic = static_cast<double>(stat);
  out.dof = cells - 1;
  out.p_value = out.dof > 0
                    ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.statistic))
                    : 1.0;
  return out;
}

ChiSquare chi_square_fit(const std::map<std::int64_t, std::int64_t>& observed,
                         const std::map<std::int64_t, double>& probs) {
  long double n = 0;
  for (const auto& [k, c] : observed) n += c;
  if (n == 0) throw std::invalid_argument("chi-square: empty sample");
  ChiSquare out;
  long double stat = 0;
  int cells = 0;
  for (const auto& [k, p] : probs) {
    if (p <= 0) continue;
    const auto it = observed.find(k);
    const long double o = it == observed.end() ? 0 : it->second;
    const long double e = n * p;
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  for (const auto& [k, c] : observed) {
    const auto it = probs.find(k);
    if (c > 0 && (it == probs.end() || it->second <= 0)) {
      out.statistic = INFINITY;
      out.dof = std::max(cells - 1, 1);
      out.p_value = 0;
      return out;
    }
  }
  out.statistic = static_cast<double>(stat);
  out.dof = cells - 1;
  out.p_value = out.dof > 0
                    ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.statistic))
                    : 1.0;
  return out;
}

nlohmann::json MomentReport::to_json() const {
  nlohmann::json j;
  auto& arr = j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"metric", r.metric}, {"empirical", r.empirical}, {"provenance", r.provenance}};
    row["target"] = r.target ? nlohmann::json(*r.target) : nlohmann::json(nullptr);
    row["z"] = r.z ? nlohmann::json(*r.z) : nlohmann::json(nullptr);
    arr.push_back(std::move(row));
  }
  j["ks"] = ks ? nlohmann::json(*ks) : nlohmann::json(nullptr);
  j["d2"] = d2 ? nlohmann::json(*d2) : nlohmann::json(nullptr);
  return j;
}

std::string MomentReport::to_csv() const {
  std::ostringstream out;
  out << "metric,empirical,target,provenance,z\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows)
    out << r.metric << ',' << format_number(r.empirical) << ',' << opt(r.target) << ',' << r.provenance << ','
        << opt(r.z) << '\n';
  if (ks) out << "ks," << format_number(*ks) << ",,,\n";
  if (d2) out << "d2," << format_number(*d2) << ",,,\n";
  return out.str();
}

MomentReport compare_samples(const SampleSet& a, const SampleSet& b) {
  a.validate();
  b.validate();
  const auto ka = k_statistics(a.values), kb = k_statistics(b.values);
  MomentReport r;
  const std::string prov = "sample " + (b.statistic.empty() ? std::string("b") : b.statistic);
  for (std::size_t k = 0; k < 4; ++k) {
    const double se = std::hypot(ka[k].se, kb[k].se);
    r.rows.push_back({"k" + std::to_string(k + 1), ka[k].value, kb[k].value, prov,
                      se > 0 ? std::optional<double>((ka[k].value - kb[k].value) / se) : std::nullopt});
    r.rows.push_back({"k" + std::to_string(k + 1) + "_se", ka[k].se, kb[k].se, prov, std::nullopt});
  }
  r.ks = ks_distance(a.values, b.values);
  r.d2 = d2_estimate(a.values, b.values);
  return r;
}

MomentReport report_against(const SampleSet& a, const std::vector<std::optional<double>>& targets,
                            const std::string& provenance) {
  a.validate();
  const auto ka = k_statistics(a.values);
  MomentReport r;
  for (std::size_t k = 0; k < 4; ++k) {
    ReportRow row{"k" + std::to_string(k + 1), ka[k].value, std::nullopt, provenance, std::nullopt};
    if (k < targets.size() && targets[k]) {
      row.target = targets[k];
      if (ka[k].se > 0) row.z = (ka[k].value - *targets[k]) / ka[k].se;
    }
    r.rows.push_back(std::move(row));
    r.rows.push_back({"k" + std::to_string(k + 1) + "_se", ka[k].se, std::nullopt, provenance, std::nullopt});
  }
  return r;
}

}  // namespace treeinv
