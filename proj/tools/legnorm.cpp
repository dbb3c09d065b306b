#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "legnorm/coeffs.hpp"
#include "legnorm/errors.hpp"
#include "legnorm/exterior.hpp"
#include "legnorm/geometry.hpp"
#include "legnorm/harness.hpp"

using namespace legnorm;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInputError = 2, kInconclusive = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void print_vec(std::ostream& os, const Vec& v) {
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt(v[i]);
  os << "]";
}

void print_mat(std::ostream& os, const std::string& name, const Mat& m) {
  os << name << ":\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << "  ";
    for (std::size_t j = 0; j < m.size(); ++j) {
      std::string s = fmt(m(i, j));
      os << std::string(s.size() < 16 ? 16 - s.size() : 1, ' ') << s;
    }
    os << "\n";
  }
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path);
  out << text;
  if (!out) throw FileError("cannot write " + path);
}

void print_suite(const SuiteReport& r) {
  for (const auto& i : r.items)
    std::cout << (i.passed ? "PASS " : "FAIL ") << i.name << ": " << i.detail
              << "\n";
}

// "v=a,b,c,x=d,e,f"; every number after a key belongs to that key.
ChartPoint parse_point(const std::string& text, std::size_t n) {
  ChartPoint p{Vec(n, 0.0), Vec(n, 0.5)};
  if (text.empty()) return p;
  Vec* target = nullptr;
  Vec values;
  bool have_v = false, have_x = false;
  auto flush = [&] {
    if (!target) return;
    if (values.size() != n)
      throw InputError("--point: expected " + std::to_string(n) +
                       " coordinates per key");
    *target = values;
    values.clear();
  };
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (const auto eq = tok.find('='); eq != std::string::npos) {
      flush();
      const std::string key = tok.substr(0, eq);
      if (key == "v" && !have_v) {
        target = &p.v;
        have_v = true;
      } else if (key == "x" && !have_x) {
        target = &p.x;
        have_x = true;
      } else {
        throw InputError("--point: unexpected key '" + key + "'");
      }
      tok = tok.substr(eq + 1);
    }
    if (!target) throw InputError("--point must start with v= or x=");
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("--point: bad number '" + tok + "'");
    }
  }
  flush();
  return p;
}

struct CheckOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 42;
  double v_range = 2.0;
  double x_range = 1.0;
  std::size_t grid = 0;
  unsigned threads = 1;
  std::string json;
};

void add_tolerance_flags(CLI::App* cmd, Tolerances& tol, bool with_tol) {
  if (with_tol)
    cmd->add_option("--tol", tol.residual_zero,
                    "zero threshold for residuals (scaled by max(1, max|g|))")
        ->capture_default_str();
  cmd->add_option("--rank-threshold", tol.rank_threshold,
                  "relative pivot threshold for rank decisions")
      ->capture_default_str();
  cmd->add_option("--omega-floor", tol.omega_floor,
                  "smallest accepted |L|^2")
      ->capture_default_str();
}

void add_sampling_flags(CLI::App* cmd, CheckOptions& o) {
  cmd->add_option("--samples", o.samples, "random sample count")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--v-range", o.v_range, "fiber coordinate half-width")
      ->capture_default_str();
  cmd->add_option("--x-range", o.x_range, "base coordinate half-width")
      ->capture_default_str();
  cmd->add_option("--grid", o.grid, "use a K^n grid over v instead of random points");
  cmd->add_option("--threads", o.threads, "worker threads")->capture_default_str();
  cmd->add_option("--json", o.json, "write the JSON report to PATH ('-' for stdout)");
}

std::vector<ChartPoint> points_for(std::size_t n, const CheckOptions& o) {
  try {
    if (o.grid > 0) return sample_points(n, GridSampling{o.grid, o.v_range});
    return sample_points(n, RandomSampling{o.samples, o.seed, o.v_range, o.x_range});
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

int report_check(const CheckResult& r, const Tolerances& tol,
                 const CheckOptions& o) {
  const RunSummary& s = r.summary;
  if (!o.json.empty()) write_file(o.json, report_json(r, tol));
  std::ostream& os = o.json == "-" ? std::cerr : std::cout;
  os << "map " << s.map_hash << "  n=" << s.n << "\n"
     << "samples " << s.samples << "  skipped " << s.skipped << "\n"
     << "worst residual_full " << fmt(s.worst_residual_full)
     << "  residual_reduced " << fmt(s.worst_residual_reduced) << "\n";
  std::map<std::string, std::size_t> reasons;
  for (const auto& sample : r.samples)
    if (sample.skipped()) ++reasons[sample.skipped_reason()];
  for (const auto& [why, count] : reasons)
    os << "  skipped " << count << " x " << why << "\n";
  os << "verdict " << verdict_name(s.verdict) << "\n";
  switch (s.verdict) {
    case Verdict::Normal: return kOk;
    case Verdict::NotNormal: return kViolation;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

int cmd_check(const std::string& file, const CheckOptions& o,
              const Tolerances& tol) {
  const MapDefinition map = load_map_file(file);
  tol.validate();
  return report_check(run_check(map, points_for(map.n, o), tol, o.threads), tol,
                      o);
}

int cmd_coeffs(int max_k, const std::string& csv, bool verify) {
  if (max_k < 1) throw InputError("--max-k must be >= 1");
  const CoeffTable t(max_k);
  if (!csv.empty()) write_file(csv, t.to_csv());
  if (csv != "-")
    for (int k = 1; k <= max_k; ++k) {
      std::cout << "k=" << k << ":";
      for (int i = 0; 2 * i < k; ++i) std::cout << " " << t.at(i, k);
      std::cout << "\n";
    }
  if (!verify) return kOk;
  if (max_k < 3) throw InputError("--verify needs --max-k >= 3");
  const SuiteReport r = run_coeff_suite(max_k);
  print_suite(r);
  return r.passed() ? kOk : kViolation;
}

int cmd_dsquared(int max_k, const std::string& mutate) {
  if (max_k < 0) throw InputError("--max-k must be >= 0");
  std::optional<CoeffTable> table;
  if (!mutate.empty()) {
    int i = 0, k = 0;
    char comma = 0;
    std::istringstream in(mutate);
    if (!(in >> i >> comma >> k) || comma != ',' || !in.eof())
      throw InputError("--mutate expects i,k");
    table.emplace(max_k + 3);
    if (!CoeffTable::in_domain(i, k) || k > max_k + 3)
      throw InputError("--mutate index outside the table");
    table->set(i, k, table->at(i, k) + 1);
    std::cout << "mutated C^" << i << "_" << k << " to " << table->at(i, k) << "\n";
  }
  const SuiteReport r = run_dsquared_suite(max_k, table ? &*table : nullptr);
  for (const auto& item : r.items)
    std::cout << (item.passed ? "PASS " : "FAIL ") << item.name << " = "
              << item.detail << "\n";
  return r.passed() ? kOk : kViolation;
}

int cmd_example(const CheckOptions& o, const Tolerances& tol) {
  tol.validate();
  const MapDefinition map = builtin_exp_scaled_map();
  std::cout << map.source;
  const auto pts = points_for(map.n, o);
  const int verdict = report_check(run_check(map, pts, tol, o.threads), tol, o);
  constexpr double kGoldenRelTol = 1e-9;
  constexpr double kResidualBound = 1e-10;
  const SuiteReport g = run_example_goldens(pts, kGoldenRelTol, kResidualBound, tol);
  std::ostream& os = o.json == "-" ? std::cerr : std::cout;
  for (const auto& i : g.items)
    os << (i.passed ? "PASS " : "FAIL ") << "golden " << i.name << ": " << i.detail
       << "\n";
  if (!g.passed()) return kViolation;
  return verdict;
}

int cmd_decompose(const std::string& file, const std::string& point,
                  const Tolerances& tol) {
  const MapDefinition map = load_map_file(file);
  tol.validate();
  const ChartPoint p = parse_point(point, map.n);
  const FiberFrame f = evaluate_frame(map, p, tol);
  std::cout << "x = ";
  print_vec(std::cout, p.x);
  std::cout << "\nv = ";
  print_vec(std::cout, p.v);
  std::cout << "\nL = ";
  print_vec(std::cout, f.L_down);
  std::cout << "\nomega = " << fmt(f.omega) << "\n";
  print_mat(std::cout, "g", f.g);
  print_mat(std::cout, "u (upper)", f.u_up);
  const RankKernel rk = rank_and_kernel(f.u_up, tol.rank_threshold);
  std::cout << "rank u = " << rk.rank << "\nkernel:";
  if (rk.kernel.empty()) std::cout << " (none)";
  for (const Vec& k : rk.kernel) {
    std::cout << "\n  ";
    print_vec(std::cout, k);
  }
  const DualA A = recover_A(f);
  std::cout << "\nA (upper) = ";
  print_vec(std::cout, A.up);
  std::cout << "\nA (lower) = ";
  print_vec(std::cout, A.down);
  std::cout << "\nresidual_full max = " << fmt(residual_full(f).max_abs())
            << "\nresidual_reduced max = " << fmt(residual_reduced(f).max_abs())
            << "\nalternation residual max = "
            << fmt(alternation_residual(f, A.down).max_abs()) << "\n";
  const Classification c = classify_gauge(f, A.down, tol);
  std::cout << "classification = " << branch_name(c.branch) << " (rank "
            << c.rank_u << ")";
  if (c.branch == Branch::GaugeFixable)
    std::cout << ", norm " << fmt(c.norm) << ", lambda " << fmt(c.lambda)
              << (c.det_vanishes ? ", det(u') = 0" : ", det(u') != 0");
  else if (c.branch == Branch::Obstructed)
    std::cout << ", norm " << fmt(c.norm);
  std::cout << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical and symbolic checks of the normality conditions for "
               "generalized Legendre maps"};
  app.require_subcommand(1);

  CheckOptions check_opts;
  Tolerances check_tol;
  std::string check_file;
  auto* check = app.add_subcommand("check", "sample a map file and test normality");
  check->add_option("file", check_file, "map definition file")->required();
  add_sampling_flags(check, check_opts);
  add_tolerance_flags(check, check_tol, true);

  int coeff_max_k = 12;
  std::string coeff_csv;
  bool coeff_verify = false;
  auto* coeffs = app.add_subcommand("coeffs", "print the normality coefficients");
  coeffs->add_option("--max-k", coeff_max_k, "last row")->required();
  coeffs->add_option("--csv", coeff_csv, "write k,i,C rows to PATH ('-' for stdout)");
  coeffs->add_flag("--verify", coeff_verify,
                   "run the closed-form, cancellation and segment checks");

  int ds_max_k = 12;
  std::string ds_mutate;
  auto* dsq = app.add_subcommand("dsquared", "check d(dA_k) = 0 symbolically");
  dsq->add_option("--max-k", ds_max_k, "largest k")->required();
  dsq->add_option("--mutate", ds_mutate, "add 1 to C^i_k first (i,k)");

  CheckOptions ex_opts;
  Tolerances ex_tol;
  std::string ex_name;
  auto* example = app.add_subcommand("example", "run the built-in exp-scaled map");
  example->add_option("name", ex_name, "example name")
      ->required()
      ->check(CLI::IsMember({"sharipov-3d", "trivial-3d"}));
  add_sampling_flags(example, ex_opts);
  add_tolerance_flags(example, ex_tol, true);

  std::string dec_file, dec_point;
  Tolerances dec_tol;
  auto* decompose = app.add_subcommand("decompose", "print the decomposition at a point");
  decompose->add_option("file", dec_file, "map definition file")->required();
  decompose->add_option("--point", dec_point, "\"v=a,b,...,x=c,d,...\"");
  add_tolerance_flags(decompose, dec_tol, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*check) return cmd_check(check_file, check_opts, check_tol);
    if (*coeffs) return cmd_coeffs(coeff_max_k, coeff_csv, coeff_verify);
    if (*dsq) return cmd_dsquared(ds_max_k, ds_mutate);
    if (*example) return cmd_example(ex_opts, ex_tol);
    if (*decompose) return cmd_decompose(dec_file, dec_point, dec_tol);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
