#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "legnorm/coeffs.hpp"
#include "legnorm/expr.hpp"
#include "legnorm/geometry.hpp"

namespace legnorm {

/// Map file format, one assignment per line, '#' starts a comment:
///
///   dim = 3
///   L1 = exp(v1)          # explicit components L1..Ln
///   ...
///
/// or a potential pair `phi = ...` and `L = ...`, expanded through
/// make_trivial_map. Throws FormatError carrying the offending line; parse
/// and bind errors are rethrown as FormatError on their line.
MapDefinition parse_map_text(std::string_view text);
/// Throws FileError if the file cannot be read.
MapDefinition load_map_file(const std::filesystem::path& path);

struct RandomSampling {
  std::size_t count = 100;
  std::uint64_t seed = 42;
  double v_range = 2.0;
  double x_range = 1.0;
};

struct GridSampling {
  std::size_t per_axis = 3;
  double v_range = 2.0;
};

using SamplingStrategy = std::variant<RandomSampling, GridSampling>;

/// Random draws x and v uniformly from [-x_range, x_range]^n and
/// [-v_range, v_range]^n; Grid is the per_axis^n lattice over v-space with
/// x = 0. Throws std::invalid_argument for a zero count or a non-positive
/// range.
std::vector<ChartPoint> sample_points(std::size_t n,
                                      const SamplingStrategy& strategy);

struct SampleMetrics {
  double omega = 0.0;
  double residual_full_max = 0.0;
  double residual_reduced_max = 0.0;
  double threshold = 0.0;  // residual_zero * max(1, max|g|)
  std::size_t rank_u = 0;
  Branch classification = Branch::Obstructed;
};

struct SampleReport {
  std::size_t index = 0;
  ChartPoint point;
  std::variant<SampleMetrics, std::string> outcome;  // metrics or skip reason

  bool skipped() const noexcept { return outcome.index() == 1; }
  const SampleMetrics& metrics() const { return std::get<0>(outcome); }
  const std::string& skipped_reason() const { return std::get<1>(outcome); }
};

enum class Verdict { Normal, NotNormal, Inconclusive };
std::string verdict_name(Verdict v);

struct RunSummary {
  std::string map_hash;
  std::size_t n = 0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  double worst_residual_full = 0.0;
  double worst_residual_reduced = 0.0;
  Verdict verdict = Verdict::Inconclusive;

  double worst_residual() const noexcept {
    return worst_residual_full > worst_residual_reduced ? worst_residual_full
                                                        : worst_residual_reduced;
  }
};

/// NOT_NORMAL if some evaluated residual exceeds 100x its threshold;
/// NORMAL if more than half the samples were evaluated and every evaluated
/// residual is within its threshold; INCONCLUSIVE otherwise. The result
/// does not depend on the order of `reports`.
RunSummary summarize(const std::vector<SampleReport>& reports, std::size_t n,
                     std::string map_hash);

struct CheckResult {
  RunSummary summary;
  std::vector<SampleReport> samples;
};

/// Evaluates every point; SingularMetric, NullOmega and DomainError become
/// skip records. `threads` > 1 spreads the points over worker threads;
/// results are merged by sample index, so the output does not depend on it.
CheckResult run_check(const MapDefinition& map,
                      const std::vector<ChartPoint>& points,
                      const Tolerances& tol = {}, unsigned threads = 1);

/// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string map_hash(std::string_view text);

/// Machine-readable report; keys and their order are fixed.
std::string report_json(const CheckResult& result, const Tolerances& tol);

struct SuiteItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::vector<SuiteItem> items;
  bool passed() const noexcept;
};

/// The 42 coefficients C^i_k for k = 1..12, row by row, i ascending.
const std::vector<std::vector<int>>& reference_coeff_rows();

/// Table vs the reference rows, closed form vs recurrence for every pair,
/// monomial cancellation for 2 <= k <= max_k and the segment identity for
/// every (m, p) whose indices stay within max_k. max_k >= 3.
SuiteReport run_coeff_suite(int max_k);

/// check_d_squared(k, k + 2) for 0 <= k <= max_k, optionally against a
/// supplied (possibly perturbed) table reaching row max_k + 3. A failing
/// item's detail is the surviving form.
SuiteReport run_dsquared_suite(int max_k,
                               const CoeffTable* table = nullptr);

/// Closed forms of the built-in exp-scaled map at fiber point v.
struct ExpScaledGolden {
  Mat g;
  Mat g_inv;
  double omega = 0.0;
  Mat P;
  Mat A_antisym;  // A - A^T
};
ExpScaledGolden exp_scaled_golden(const Vec& v);

/// max |a - b| / max(1, max |b|).
double relative_error(const Mat& a, const Mat& b);

/// Frame quantities of builtin_exp_scaled_map() against the closed forms at
/// each point, every item within `rel_tol`, plus max residual_full below
/// `residual_bound`.
SuiteReport run_example_goldens(const std::vector<ChartPoint>& points,
                                double rel_tol, double residual_bound,
                                const Tolerances& tol = {});

}  // namespace legnorm
