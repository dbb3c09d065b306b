#include "legnorm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "legnorm/errors.hpp"
#include "legnorm/exterior.hpp"

namespace legnorm {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct Assignment {
  std::size_t line;
  std::string value;
};

Expression parse_on_line(const Assignment& a) {
  try {
    return parse_expression(a.value);
  } catch (const Error& e) {
    throw FormatError(a.line, e.kind() + ": " + e.what());
  }
}

void bind_on_line(const Expression& e, std::size_t n, std::size_t line) {
  try {
    bind(e, n);
  } catch (const Error& err) {
    throw FormatError(line, err.kind() + ": " + err.what());
  }
}

}  // namespace

MapDefinition parse_map_text(std::string_view text) {
  std::map<std::string, Assignment> keys;
  std::size_t line_no = 0;
  std::size_t last_line = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError(line_no, "expected '<key> = <value>'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw FormatError(line_no, "missing key");
    if (value.empty()) throw FormatError(line_no, "missing value for " + key);
    if (!keys.emplace(key, Assignment{line_no, value}).second)
      throw FormatError(line_no, "duplicate key " + key);
    last_line = line_no;
  }

  const auto dim_it = keys.find("dim");
  if (dim_it == keys.end()) throw FormatError(0, "missing dim");
  const Assignment& dim = dim_it->second;
  std::size_t n = 0;
  const char* first = dim.value.data();
  const char* last = first + dim.value.size();
  if (auto [p, ec] = std::from_chars(first, last, n);
      ec != std::errc{} || p != last)
    throw FormatError(dim.line, "dim must be an integer");
  if (n < 2) throw FormatError(dim.line, "dim must be at least 2");

  const bool potential = keys.contains("phi") || keys.contains("L");
  for (const auto& [key, a] : keys) {
    if (key == "dim" || key == "phi" || key == "L") continue;
    std::size_t idx = 0;
    const char* kb = key.data() + 1;
    const char* ke = key.data() + key.size();
    if (key.size() < 2 || key[0] != 'L' ||
        std::from_chars(kb, ke, idx).ptr != ke || idx == 0)
      throw FormatError(a.line, "unknown key " + key);
    if (potential)
      throw FormatError(a.line, "cannot mix " + key + " with phi/L");
    if (idx > n)
      throw FormatError(a.line, key + " exceeds dim = " + std::to_string(n));
  }

  if (potential) {
    const auto phi = keys.find("phi");
    const auto pot = keys.find("L");
    if (phi == keys.end()) throw FormatError(last_line, "missing phi");
    if (pot == keys.end()) throw FormatError(last_line, "missing L");
    const Expression phi_e = parse_on_line(phi->second);
    const Expression pot_e = parse_on_line(pot->second);
    bind_on_line(phi_e, n, phi->second.line);
    bind_on_line(pot_e, n, pot->second.line);
    MapDefinition m = make_trivial_map(phi_e, pot_e, n);
    m.body = PotentialPair{phi_e, pot_e};
    m.source = m.to_text();
    return m;
  }

  std::vector<Expression> comps;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto it = keys.find("L" + std::to_string(i));
    if (it == keys.end())
      throw FormatError(last_line, "expected " + std::to_string(n) +
                                       " components (missing L" +
                                       std::to_string(i) + ")");
    Expression e = parse_on_line(it->second);
    bind_on_line(e, n, it->second.line);
    comps.push_back(std::move(e));
  }
  return make_explicit_map(n, std::move(comps));
}

MapDefinition load_map_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError("cannot read " + path.string());
  return parse_map_text(buf.str());
}

std::vector<ChartPoint> sample_points(std::size_t n,
                                      const SamplingStrategy& strategy) {
  if (n == 0) throw std::invalid_argument("dimension must be positive");
  std::vector<ChartPoint> out;
  if (const auto* r = std::get_if<RandomSampling>(&strategy)) {
    if (r->count == 0) throw std::invalid_argument("sample count must be >= 1");
    if (!(r->v_range > 0) || !(r->x_range > 0))
      throw std::invalid_argument("sampling ranges must be positive");
    std::mt19937_64 rng(r->seed);
    // 53 random bits mapped to [-range, range]; avoids the
    // implementation-defined std::uniform_real_distribution.
    auto draw = [&rng](double range) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      return (2.0 * u - 1.0) * range;
    };
    out.reserve(r->count);
    for (std::size_t s = 0; s < r->count; ++s) {
      ChartPoint p{Vec(n), Vec(n)};
      for (auto& x : p.x) x = draw(r->x_range);
      for (auto& v : p.v) v = draw(r->v_range);
      out.push_back(std::move(p));
    }
    return out;
  }
  const auto& g = std::get<GridSampling>(strategy);
  if (g.per_axis == 0) throw std::invalid_argument("per_axis must be >= 1");
  if (!(g.v_range > 0)) throw std::invalid_argument("v_range must be positive");
  Vec axis(g.per_axis, 0.0);
  if (g.per_axis > 1)
    for (std::size_t i = 0; i < g.per_axis; ++i)
      axis[i] = -g.v_range + 2.0 * g.v_range * static_cast<double>(i) /
                                 static_cast<double>(g.per_axis - 1);
  std::vector<std::size_t> digit(n, 0);
  while (true) {
    ChartPoint p{Vec(n, 0.0), Vec(n)};
    for (std::size_t i = 0; i < n; ++i) p.v[i] = axis[digit[i]];
    out.push_back(std::move(p));
    std::size_t i = n;
    while (i > 0 && ++digit[i - 1] == g.per_axis) digit[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Normal: return "NORMAL";
    case Verdict::NotNormal: return "NOT_NORMAL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

RunSummary summarize(const std::vector<SampleReport>& reports, std::size_t n,
                     std::string map_hash) {
  RunSummary s;
  s.map_hash = std::move(map_hash);
  s.n = n;
  s.samples = reports.size();
  bool violation = false;
  bool all_within = true;
  for (const auto& r : reports) {
    if (r.skipped()) {
      ++s.skipped;
      continue;
    }
    const auto& m = r.metrics();
    s.worst_residual_full = std::max(s.worst_residual_full, m.residual_full_max);
    s.worst_residual_reduced =
        std::max(s.worst_residual_reduced, m.residual_reduced_max);
    const double res = std::max(m.residual_full_max, m.residual_reduced_max);
    // NaN residuals count as violations
    if (!(res <= 100.0 * m.threshold)) violation = true;
    if (!(res <= m.threshold)) all_within = false;
  }
  const std::size_t evaluated = s.samples - s.skipped;
  if (violation)
    s.verdict = Verdict::NotNormal;
  else if (2 * evaluated > s.samples && all_within)
    s.verdict = Verdict::Normal;
  else
    s.verdict = Verdict::Inconclusive;
  return s;
}

namespace {

SampleReport evaluate_sample(const MapDefinition& map, const ChartPoint& p,
                             std::size_t index, const Tolerances& tol) {
  SampleReport r;
  r.index = index;
  r.point = p;
  try {
    const FiberFrame f = evaluate_frame(map, p, tol);
    SampleMetrics m;
    m.omega = f.omega;
    m.residual_full_max = residual_full(f).max_abs();
    m.residual_reduced_max = residual_reduced(f).max_abs();
    m.threshold = tol.residual_zero * std::max(1.0, f.g.max_abs());
    const Classification c = classify_gauge(f, recover_A(f).down, tol);
    m.rank_u = c.rank_u;
    m.classification = c.branch;
    r.outcome = m;
  } catch (const SingularMetric&) {
    r.outcome = std::string("SingularMetric");
  } catch (const NullOmega&) {
    r.outcome = std::string("NullOmega");
  } catch (const DomainError&) {
    r.outcome = std::string("DomainError");
  } catch (const SingularMatrix&) {
    r.outcome = std::string("SingularMetric");
  }
  return r;
}

}  // namespace

CheckResult run_check(const MapDefinition& map,
                      const std::vector<ChartPoint>& points,
                      const Tolerances& tol, unsigned threads) {
  tol.validate();
  CheckResult out;
  out.samples.resize(points.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      out.samples[i] = evaluate_sample(map, points[i], i, tol);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();)
          out.samples[i] = evaluate_sample(map, points[i], i, tol);
      });
  }
  out.summary = summarize(out.samples, map.n, map_hash(map.source));
  return out;
}

std::string map_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return s;
}

std::string report_json(const CheckResult& result, const Tolerances& tol) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["map_hash"] = result.summary.map_hash;
  j["n"] = result.summary.n;
  j["tolerances"] = {{"residual_zero", tol.residual_zero},
                     {"rank_threshold", tol.rank_threshold},
                     {"omega_floor", tol.omega_floor},
                     {"fd_step", tol.fd_step}};
  ordered_json samples = ordered_json::array();
  for (const auto& r : result.samples) {
    ordered_json s;
    s["x"] = r.point.x;
    s["v"] = r.point.v;
    if (r.skipped()) {
      s["omega"] = nullptr;
      s["residual_full_max"] = nullptr;
      s["residual_reduced_max"] = nullptr;
      s["rank_u"] = nullptr;
      s["classification"] = nullptr;
      s["skipped"] = r.skipped_reason();
    } else {
      const auto& m = r.metrics();
      s["omega"] = m.omega;
      s["residual_full_max"] = m.residual_full_max;
      s["residual_reduced_max"] = m.residual_reduced_max;
      s["rank_u"] = m.rank_u;
      s["classification"] = branch_name(m.classification);
      s["skipped"] = nullptr;
    }
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  j["summary"] = {{"verdict", verdict_name(result.summary.verdict)},
                  {"worst_residual", result.summary.worst_residual()},
                  {"skipped", result.summary.skipped}};
  return j.dump(2) + "\n";
}

bool SuiteReport::passed() const noexcept {
  return std::all_of(items.begin(), items.end(),
                     [](const SuiteItem& i) { return i.passed; });
}

const std::vector<std::vector<int>>& reference_coeff_rows() {
  static const std::vector<std::vector<int>> rows = {
      {1},
      {1},
      {1, 1},
      {1, 2},
      {1, 3, 2},
      {1, 4, 5},
      {1, 5, 9, 5},
      {1, 6, 14, 14},
      {1, 7, 20, 28, 14},
      {1, 8, 27, 48, 42},
      {1, 9, 35, 75, 90, 42},
      {1, 10, 44, 110, 165, 132},
  };
  return rows;
}

SuiteReport run_coeff_suite(int max_k) {
  if (max_k < 3) throw std::invalid_argument("coefficient suite needs max_k >= 3");
  SuiteReport rep;
  // cancellation at k reads row k + 1
  const CoeffTable table(max_k + 1);

  {
    SuiteItem item{"reference table", true, ""};
    const auto& rows = reference_coeff_rows();
    std::size_t compared = 0;
    for (int k = 1; k <= std::min<int>(max_k, static_cast<int>(rows.size())); ++k)
      for (int i = 0; 2 * i < k; ++i, ++compared)
        if (table.at(i, k) != rows[static_cast<std::size_t>(k - 1)]
                                  [static_cast<std::size_t>(i)]) {
          item.passed = false;
          item.detail += "C^" + std::to_string(i) + "_" + std::to_string(k) +
                         " = " + table.at(i, k).str() + "; ";
        }
    if (item.passed) item.detail = std::to_string(compared) + " values match";
    rep.items.push_back(std::move(item));
  }

  {
    SuiteItem item{"closed form", true, ""};
    std::size_t pairs = 0;
    for (const auto& e : table.entries()) {
      if (e.k > max_k) break;
      ++pairs;
      std::string got;
      try {
        const BigInt c = coeff_closed(e.i, e.k);
        if (c == e.value) continue;
        got = c.str();
      } catch (const NonIntegerResult&) {
        got = "non-integer";
      }
      item.passed = false;
      item.detail += "(i=" + std::to_string(e.i) + ", k=" + std::to_string(e.k) +
                     "): closed " + got + " vs recurrence " + e.value.str() + "; ";
    }
    if (item.passed) item.detail = std::to_string(pairs) + " pairs agree";
    rep.items.push_back(std::move(item));
  }

  for (int k = 2; k <= max_k; ++k) {
    const CancellationReport c = verify_monomial_cancellation(k, table);
    SuiteItem item{"cancellation k=" + std::to_string(k), c.passed(),
                   std::to_string(c.terms) + " terms, " +
                       std::to_string(c.monomials) + " monomials"};
    for (const auto& [t, v] : c.residues)
      item.detail += "; A" + std::to_string(t.a) + "^A" + std::to_string(t.b) +
                     "^A" + std::to_string(t.c) + " = " + v.str();
    rep.items.push_back(std::move(item));
  }

  {
    SuiteItem item{"segment identity", true, ""};
    std::size_t count = 0;
    for (int m = 0; 2 * m + 8 <= max_k; ++m)
      for (int p = 0; 2 * p < m + 1; ++p, ++count)
        if (!verify_segment_identity(m, p)) {
          item.passed = false;
          item.detail += "(m=" + std::to_string(m) + ", p=" +
                         std::to_string(p) + ") ";
        }
    if (item.passed) item.detail = std::to_string(count) + " instances";
    rep.items.push_back(std::move(item));
  }
  return rep;
}

SuiteReport run_dsquared_suite(int max_k, const CoeffTable* table) {
  if (max_k < 0) throw std::invalid_argument("max_k must be >= 0");
  std::optional<CoeffTable> own;
  if (!table) table = &own.emplace(max_k + 3);
  if (table->max_k() < max_k + 3)
    throw std::invalid_argument("coefficient table must reach row max_k + 3");
  SuiteReport rep;
  for (int k = 0; k <= max_k; ++k) {
    const FormExpr d2 = check_d_squared(k, k + 2, *table);
    rep.items.push_back({"d^2 A" + std::to_string(k), d2.is_zero(),
                         d2.to_string()});
  }
  return rep;
}

ExpScaledGolden exp_scaled_golden(const Vec& v) {
  if (v.size() != 3) throw std::invalid_argument("expected a 3-vector");
  const double e = std::exp(v[0]);
  const double ei = std::exp(-v[0]);
  const double a = v[1], b = v[2];
  ExpScaledGolden gd;
  gd.g = e * Mat{{1, 0, 0}, {a, 1, 0}, {b, 0, 1}};
  gd.g_inv = ei * Mat{{1, 0, 0}, {-a, 1, 0}, {-b, 0, 1}};
  gd.omega = e;
  const double l1 = 1 - a * a - b * b;
  gd.P = Mat{{1 - l1, -l1 * a, -l1 * b},
             {-a, 1 - a * a, -a * b},
             {-b, -a * b, 1 - b * b}};
  gd.A_antisym = ei * Mat{{0, a, b}, {-a, 0, 0}, {-b, 0, 0}};
  return gd;
}

double relative_error(const Mat& a, const Mat& b) {
  return (a - b).max_abs() / std::max(1.0, b.max_abs());
}

SuiteReport run_example_goldens(const std::vector<ChartPoint>& points,
                                double rel_tol, double residual_bound,
                                const Tolerances& tol) {
  const MapDefinition map = builtin_exp_scaled_map();
  double err_g = 0, err_ginv = 0, err_omega = 0, err_p = 0, err_a = 0;
  double worst_residual = 0;
  std::size_t evaluated = 0;
  for (const auto& p : points) {
    const FiberFrame f = evaluate_frame(map, p, tol);
    const ExpScaledGolden gd = exp_scaled_golden(p.v);
    err_g = std::max(err_g, relative_error(f.g, gd.g));
    err_ginv = std::max(err_ginv, relative_error(f.g_inv, gd.g_inv));
    err_omega = std::max(err_omega, std::abs(f.omega - gd.omega) /
                                        std::max(1.0, std::abs(gd.omega)));
    err_p = std::max(err_p, relative_error(f.P, gd.P));
    err_a = std::max(err_a, relative_error(f.A - f.A.transposed(), gd.A_antisym));
    worst_residual = std::max(worst_residual, residual_full(f).max_abs());
    ++evaluated;
  }
  auto item = [&](std::string name, double err, double bound) {
    std::ostringstream os;
    os << "max error " << err << " over " << evaluated << " points";
    return SuiteItem{std::move(name), err <= bound, os.str()};
  };
  SuiteReport rep;
  rep.items.push_back(item("g", err_g, rel_tol));
  rep.items.push_back(item("g_inv", err_ginv, rel_tol));
  rep.items.push_back(item("omega", err_omega, rel_tol));
  rep.items.push_back(item("P", err_p, rel_tol));
  rep.items.push_back(item("A - A^T", err_a, rel_tol));
  rep.items.push_back(item("normality residual", worst_residual, residual_bound));
  return rep;
}

}  // namespace legnorm
