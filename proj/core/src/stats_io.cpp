#include "optdict/stats_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "optdict/error.hpp"

namespace optdict {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    out.push_back(line.substr(begin, comma == std::string_view::npos ? line.npos : comma - begin));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidInput(what + ": malformed JSON (" + e.what() + ")");
  }
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InvalidInput(std::string("dictionary schema error: missing field \"") + key + "\"");
  }
  return obj.at(key);
}

std::vector<double> as_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidInput("schema error: \"" + field + "\" must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidInput("schema error: \"" + field + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

MatrixXd as_rows(const json& j, const std::string& field, Index cols = -1) {
  if (!j.is_array() || j.empty()) {
    throw InvalidInput("schema error: \"" + field + "\" must be a non-empty array of rows");
  }
  const auto rows = static_cast<Index>(j.size());
  MatrixXd out;
  for (Index r = 0; r < rows; ++r) {
    const auto row = as_vector(j[static_cast<std::size_t>(r)], field);
    if (r == 0) {
      if (cols < 0) cols = static_cast<Index>(row.size());
      out.resize(rows, cols);
    }
    if (static_cast<Index>(row.size()) != cols) {
      throw InvalidInput("schema error: \"" + field + "\" row " + std::to_string(r + 1) +
                         " has " + std::to_string(row.size()) + " entries, expected " +
                         std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) out(r, c) = row[static_cast<std::size_t>(c)];
  }
  return out;
}

json matrix_rows(const MatrixXd& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_json(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

SampleSet::SampleSet(MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) throw InvalidInput("sample set is empty");
  if (!rows_.allFinite()) throw InvalidInput("sample set contains non-finite entries");
}

SampleSet parse_samples_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool seen_first = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto fields = split(content);
    std::vector<std::optional<double>> parsed;
    parsed.reserve(fields.size());
    for (auto f : fields) parsed.push_back(parse_number(f));

    if (!seen_first) {
      seen_first = true;
      const bool any_numeric =
          std::any_of(parsed.begin(), parsed.end(), [](const auto& p) { return p.has_value(); });
      if (!any_numeric) {
        dim = fields.size();
        continue;  // header
      }
    }
    if (dim == 0) dim = fields.size();
    if (fields.size() != dim) {
      throw InvalidInput("CSV ragged row at row " + std::to_string(line_no) + ": expected " +
                         std::to_string(dim) + " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parsed[c] || !std::isfinite(*parsed[c])) {
        throw InvalidInput("CSV non-numeric field at row " + std::to_string(line_no) +
                           ", column " + std::to_string(c + 1) + ": '" +
                           std::string(trim(fields[c])) + "'");
      }
      data.push_back(*parsed[c]);
    }
    ++rows;
  }
  if (rows == 0) throw InvalidInput("CSV contains no sample rows");
  MatrixXd m(static_cast<Index>(rows), static_cast<Index>(dim));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = data[r * dim + c];
    }
  }
  return SampleSet(std::move(m));
}

SampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_samples_csv(in);
}

void write_samples_csv(std::ostream& out, const SampleSet& samples) {
  const auto old_precision = out.precision(17);
  const MatrixXd& m = samples.rows();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

MomentEstimate empirical_moments(const SampleSet& samples, CovarianceDivisor divisor) {
  const MatrixXd& x = samples.rows();
  const Index N = x.rows();
  if (divisor == CovarianceDivisor::kUnbiased && N < 2) {
    throw InvalidInput("unbiased covariance needs at least two samples");
  }
  const VectorXd mean = x.colwise().mean().transpose();
  const MatrixXd centered = x.rowwise() - mean.transpose();
  const double denom =
      divisor == CovarianceDivisor::kPopulation ? static_cast<double>(N) : static_cast<double>(N - 1);
  MatrixXd cov = (centered.transpose() * centered) / denom;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return MomentEstimate(mean, std::move(cov));
}

std::string dictionary_to_json(const Dictionary& dict) {
  json j;
  j["center"] = vector_json(dict.center());
  j["vectors"] = matrix_rows(dict.vectors().transpose());
  j["lengths"] = dict.profile().vector();
  j["spectrum"] = dict.spectrum().lambda;
  j["frame_operator"] = matrix_rows(dict.frame_operator());
  j["cost"] = dict.cost();
  j["meta"] = {{"version", std::string(kFormatVersion)},
               {"format", "optdict.dictionary"},
               {"dimension", dict.dimension()},
               {"count", dict.size()},
               {"tolerances", {{"length", 1e-9}, {"frame_operator", 1e-8}}}};
  return j.dump(2) + "\n";
}

Dictionary dictionary_from_json(std::string_view text) {
  const json j = parse_json(text, "dictionary");
  if (!j.is_object()) throw InvalidInput("dictionary schema error: top level must be an object");
  if (j.contains("meta")) {
    const json& meta = j.at("meta");
    if (meta.contains("version") &&
        (!meta.at("version").is_string() || meta.at("version").get<std::string>() != kFormatVersion)) {
      throw InvalidInput("dictionary schema error: unsupported meta.version");
    }
  }
  const auto center_vec = as_vector(require(j, "center"), "center");
  if (center_vec.empty()) throw InvalidInput("dictionary schema error: \"center\" is empty");
  const auto n = static_cast<Index>(center_vec.size());
  const MatrixXd rows = as_rows(require(j, "vectors"), "vectors", n);
  const auto lengths = as_vector(require(j, "lengths"), "lengths");
  const auto spectrum = as_vector(require(j, "spectrum"), "spectrum");
  const MatrixXd frame = as_rows(require(j, "frame_operator"), "frame_operator", n);
  const json& cost_j = require(j, "cost");
  if (!cost_j.is_number()) throw InvalidInput("dictionary schema error: \"cost\" must be a number");
  if (frame.rows() != n) {
    throw InvalidInput("dictionary schema error: \"frame_operator\" must be " +
                       std::to_string(n) + "x" + std::to_string(n));
  }
  if (static_cast<Index>(lengths.size()) != rows.rows()) {
    throw InvalidInput("dictionary schema error: \"lengths\" has " +
                       std::to_string(lengths.size()) + " entries for " +
                       std::to_string(rows.rows()) + " vectors");
  }

  Dictionary dict(Eigen::Map<const VectorXd>(center_vec.data(), n), rows.transpose(),
                  LengthProfile(lengths), OptimalSpectrum{spectrum}, cost_j.get<double>());
  const double scale = std::max(1.0, dict.frame_operator().cwiseAbs().maxCoeff());
  if ((frame - dict.frame_operator()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInput(
        "dictionary invariant violated: frame_operator differs from the sum of outer products of "
        "the vectors");
  }
  return dict;
}

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << dictionary_to_json(dict);
  if (!out) throw IoError("failed writing " + path.string());
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  return dictionary_from_json(read_file(path));
}

MomentEstimate load_moments(const std::filesystem::path& covariance_path,
                            const std::optional<std::filesystem::path>& mean_path) {
  const json cov_doc = parse_json(read_file(covariance_path), covariance_path.string());
  const json* cov_j = &cov_doc;
  std::optional<std::vector<double>> mean;
  if (cov_doc.is_object()) {
    if (!cov_doc.contains("covariance")) {
      throw InvalidInput("covariance file must be an array of rows or hold a \"covariance\" key");
    }
    cov_j = &cov_doc.at("covariance");
    if (cov_doc.contains("mean")) mean = as_vector(cov_doc.at("mean"), "mean");
  }
  MatrixXd cov = as_rows(*cov_j, "covariance");
  if (mean_path) {
    const json mean_doc = parse_json(read_file(*mean_path), mean_path->string());
    if (mean_doc.is_object()) {
      if (!mean_doc.contains("mean")) throw InvalidInput("mean file must hold a \"mean\" key");
      mean = as_vector(mean_doc.at("mean"), "mean");
    } else {
      mean = as_vector(mean_doc, "mean");
    }
  }
  VectorXd mu = mean ? VectorXd(Eigen::Map<const VectorXd>(mean->data(), static_cast<Index>(mean->size())))
                     : VectorXd(VectorXd::Zero(cov.rows()));
  return MomentEstimate(std::move(mu), std::move(cov));
}

}  // namespace optdict
