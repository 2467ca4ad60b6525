#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optdict/dictionary.hpp"
#include "optdict/error.hpp"
#include "optdict/stats_io.hpp"
#include "optdict/verify.hpp"

namespace optdict::cli {

namespace {

using nlohmann::json;

constexpr int kExitNumerical = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

// Residuals at or below this count as a tight frame in reports.
constexpr double kTightFrameTol = 1e-8;
// |MC - p*| within this many standard errors is a PASS.
constexpr double kMonteCarloSigmas = 4.0;

struct MomentSource {
  std::string samples;
  std::string cov;
  std::string mean;
};

void add_moment_flags(CLI::App* cmd, MomentSource& src) {
  auto* samples = cmd->add_option("--samples", src.samples, "CSV of samples, one per row");
  auto* cov = cmd->add_option("--cov", src.cov, "JSON covariance matrix");
  auto* mean = cmd->add_option("--mean", src.mean, "JSON mean vector (default zero)");
  samples->excludes(cov);
  mean->needs(cov);
}

MomentEstimate load_source(const MomentSource& src) {
  if (!src.samples.empty()) return empirical_moments(load_samples(src.samples));
  if (!src.cov.empty()) {
    std::optional<std::filesystem::path> mean;
    if (!src.mean.empty()) mean = src.mean;
    return load_moments(src.cov, mean);
  }
  throw InvalidInput("exactly one of --samples or --cov is required");
}

LengthProfile read_profile(const std::vector<double>& lengths, std::ostream& err) {
  bool sorted = true;
  LengthProfile profile = LengthProfile::from_unsorted(lengths, &sorted);
  if (!sorted) {
    err << "warning: --lengths not in descending order; using";
    for (std::size_t i = 0; i < profile.size(); ++i) err << (i ? "," : " ") << profile[i];
    err << '\n';
  }
  return profile;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("OPTDICT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  const std::string_view text(env);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("OPTDICT_SEED must be a non-negative integer, got '" + std::string(text) + "'");
  }
  return seed;
}

json meta() { return {{"version", std::string(kFormatVersion)}, {"tool", "optdict"}}; }

json to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  MomentSource source;
  std::vector<double> lengths;
  std::string out;
  double drop_tol = 1e-9;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  const MomentEstimate moments = load_source(a.source);
  const LengthProfile profile = read_profile(a.lengths, err);
  DictionaryOptions options;
  options.drop_tol = a.drop_tol;
  const OptimalDesign design = design_optimal_dictionary(moments, profile, options);
  save_dictionary(design.dictionary, a.out);

  json blocks = json::array();
  for (std::size_t l = 0; l < design.partition.block_count(); ++l) {
    json block = json::array();
    for (std::size_t i = design.partition.block_begin(l); i < design.partition.block_end(l); ++i) {
      block.push_back(i + 1);
    }
    blocks.push_back(std::move(block));
  }
  const double residual = tight_frame_residual(design.dictionary);
  json report = {
      {"command", "optimize"},
      {"cost", design.j_cost},
      {"spectrum", design.dictionary.spectrum().lambda},
      {"eigenvalues", to_json(design.spectral.eigenvalues)},
      {"effective_rank", design.spectral.rank()},
      {"partition",
       {{"blocks", blocks}, {"boundaries", design.partition.one_based_boundaries()}}},
      {"dual", {{"x", design.dual.x}, {"objective", design.dual.objective}}},
      {"lengths", profile.vector()},
      {"dimension", design.dictionary.dimension()},
      {"count", design.dictionary.size()},
      {"tight_frame_residual", residual},
      {"tight_frame", residual <= kTightFrameTol},
      {"output", a.out},
      {"meta", meta()},
  };
  out << report.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string dict;
  MomentSource source;
  Eigen::Index draws = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& /*err*/) {
  const Dictionary dict = load_dictionary(a.dict);
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  json source;
  std::optional<SampleSet> samples;
  if (!a.source.samples.empty()) {
    samples.emplace(load_samples(a.source.samples));
    source = {{"kind", "samples"}, {"path", a.source.samples}};
  } else {
    const MomentEstimate moments = load_source(a.source);
    samples.emplace(sample_gaussian(moments, a.draws, seed));
    source = {{"kind", "gaussian"}, {"draws", a.draws}, {"seed", seed}};
  }

  const MonteCarloEstimate mc = monte_carlo_cost(dict, *samples, MonteCarloOptions{a.threads});
  const double gap = mc.mean - dict.cost();
  const double bound = kMonteCarloSigmas * mc.standard_error;
  const bool pass = std::abs(gap) <= bound;

  // Trace formula on the empirical moments of the same samples. It agrees
  // with the sample average up to rounding whenever the samples stay in span.
  json empirical = nullptr;
  json trace_gap = nullptr;
  try {
    const double e = expected_cost(dict, empirical_moments(*samples));
    empirical = e;
    trace_gap = mc.mean - e;
  } catch (const InvalidInput&) {
    // Samples leave the dictionary span; the trace formula does not apply.
  }
  const double residual = tight_frame_residual(dict);

  json report = {
      {"command", "verify"},
      {"source", source},
      {"samples", mc.samples},
      {"monte_carlo_cost", mc.mean},
      {"standard_error", mc.standard_error},
      {"expected_cost", dict.cost()},
      {"gap", gap},
      {"bound", bound},
      {"empirical_expected_cost", empirical},
      {"trace_gap", trace_gap},
      {"tight_frame_residual", residual},
      {"tight_frame_gap", residual},
      {"status", pass ? "PASS" : "FAIL"},
      {"meta", meta()},
  };
  out << report.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string dict;
  std::string input;
  std::string out;
  double tol = 1e-9;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out, std::ostream& err) {
  const Dictionary dict = load_dictionary(a.dict);
  const SampleSet input = load_samples(a.input);
  if (input.dimension() != dict.dimension()) {
    throw InvalidInput("encode: input has dimension " + std::to_string(input.dimension()) +
                       ", dictionary has " + std::to_string(dict.dimension()));
  }
  std::ofstream file(a.out, std::ios::trunc);
  if (!file) throw IoError("cannot write " + a.out);
  file.precision(17);
  for (Eigen::Index k = 0; k < dict.size(); ++k) file << 'r' << (k + 1) << ',';
  file << "residual\n";

  std::size_t outside = 0;
  for (Eigen::Index j = 0; j < input.size(); ++j) {
    const Encoding e = encode(dict, input.rows().row(j).transpose(), a.tol);
    if (!e.representable) ++outside;
    for (Eigen::Index k = 0; k < e.coefficients.size(); ++k) file << e.coefficients(k) << ',';
    file << e.residual << '\n';
  }
  if (!file) throw IoError("failed writing " + a.out);
  if (outside > 0) {
    err << "warning: " << outside << " of " << input.size()
        << " rows lie outside the dictionary span; least-squares coefficients written\n";
  }
  json report = {{"command", "encode"},
                 {"rows", input.size()},
                 {"outside_span", outside},
                 {"output", a.out},
                 {"meta", meta()}};
  out << report.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- robustness

struct RobustnessArgs {
  MomentSource source;
  std::vector<double> lengths;
  std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  std::optional<std::uint64_t> seed;
  std::string perturb = "both";
  bool json_out = false;
};

int cmd_robustness(const RobustnessArgs& a, std::ostream& out, std::ostream& err) {
  const MomentEstimate moments = load_source(a.source);
  const LengthProfile profile = read_profile(a.lengths, err);
  RobustnessOptions options;
  options.seed = a.seed ? *a.seed : default_seed();
  options.perturb_mean = a.perturb != "cov";
  options.perturb_covariance = a.perturb != "mean";
  const auto rows = robustness_sweep(moments, profile, a.deltas, options);
  const std::string model =
      "mu' = mu + delta*|mu|*g, Sigma' = Sigma + delta*|Sigma|_F*G (seeded stand-in for "
      "estimation error)";

  if (a.json_out) {
    json table = json::array();
    for (const auto& r : rows) {
      table.push_back({{"delta", r.delta},
                       {"cost_gap", r.cost_gap},
                       {"perturbed_cost", r.perturbed_cost},
                       {"psd_clipped", r.psd_clipped},
                       {"span_deficient", r.span_deficient}});
    }
    json report = {{"command", "robustness"},
                   {"seed", options.seed},
                   {"perturb", a.perturb},
                   {"perturbation_model", model},
                   {"rows", table},
                   {"meta", meta()}};
    out << report.dump(2) << '\n';
    return 0;
  }
  out << "# perturbation model: " << model << '\n';
  out << "# seed " << options.seed << ", perturb " << a.perturb << '\n';
  out << "delta,cost_gap,perturbed_cost,psd_clipped,span_deficient\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.6e,%.17g,%.17g,%d,%d\n", r.delta, r.cost_gap,
                  r.perturbed_cost, r.psd_clipped ? 1 : 0, r.span_deficient ? 1 : 0);
    out << line;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal l2 dictionaries from first and second moments", "optdict"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kFormatVersion));

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Compute the optimal dictionary");
  add_moment_flags(optimize, opt.source);
  optimize->add_option("--lengths", opt.lengths, "Squared lengths c_i, comma separated")
      ->required()
      ->delimiter(',');
  optimize->add_option("--out", opt.out, "Dictionary JSON to write")->required();
  optimize->add_option("--drop-tol", opt.drop_tol,
                       "Relative eigenvalue threshold for the effective rank");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Check a dictionary against samples");
  verify->add_option("--dict", ver.dict, "Dictionary JSON")->required();
  add_moment_flags(verify, ver.source);
  verify->add_option("--draws", ver.draws, "Gaussian draws when moments are given")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", ver.seed, "Seed for synthesized samples (default $OPTDICT_SEED or 0)");
  verify->add_option("--threads", ver.threads, "Chunks summed in parallel (default 1)");

  EncodeArgs enc;
  auto* encode_cmd = app.add_subcommand("encode", "Minimum-norm coefficients for each input row");
  encode_cmd->add_option("--dict", enc.dict, "Dictionary JSON")->required();
  encode_cmd->add_option("--input", enc.input, "CSV of vectors")->required();
  encode_cmd->add_option("--out", enc.out, "Coefficient CSV to write")->required();
  encode_cmd->add_option("--tol", enc.tol, "Relative residual counted as in span");

  RobustnessArgs rob;
  auto* robustness = app.add_subcommand("robustness", "Cost gap under perturbed moments");
  add_moment_flags(robustness, rob.source);
  robustness->add_option("--lengths", rob.lengths, "Squared lengths c_i, comma separated")
      ->required()
      ->delimiter(',');
  robustness->add_option("--deltas", rob.deltas, "Perturbation scales, comma separated")
      ->delimiter(',');
  robustness->add_option("--seed", rob.seed, "Perturbation seed (default $OPTDICT_SEED or 0)");
  robustness->add_option("--perturb", rob.perturb, "Which moments to perturb")
      ->check(CLI::IsMember({"both", "mean", "cov"}));
  robustness->add_flag("--json", rob.json_out, "Machine-readable output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt, out, err);
    if (verify->parsed()) return cmd_verify(ver, out, err);
    if (encode_cmd->parsed()) return cmd_encode(enc, out, err);
    if (robustness->parsed()) return cmd_robustness(rob, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalid;
}

}  // namespace optdict::cli
