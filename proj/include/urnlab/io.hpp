#pragma once

// File surfaces shared by the CLI and tests: urn specs as JSON documents,
// trajectories and moment series as CSV, classification reports as JSON.
// Complex numbers are serialized as [re, im] pairs and multi-indices as
// comma-joined integers; doubles rely on shortest round-trip formatting so
// identical values yield byte-identical files.

#include <urnlab/moments.hpp>
#include <urnlab/multi_index.hpp>
#include <urnlab/spectral.hpp>
#include <urnlab/urn.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace urnlab {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Shortest representation that still round-trips; integral values print bare.
inline std::string csv_number(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15)
    return std::to_string(static_cast<long long>(x));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = 0.0;
  std::sscanf(buf, "%lg", &back);
  if (back == x) {
    for (int prec = 1; prec < 17; ++prec) {
      char probe[40];
      std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
      std::sscanf(probe, "%lg", &back);
      if (back == x) return probe;
    }
  }
  return buf;
}

inline double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + " must be a number");
  return j.get<double>();
}

}  // namespace detail

template <class R>
nlohmann::json complex_pair(const Cx<R>& z) {
  return nlohmann::json::array({approx(z.re), approx(z.im)});
}

inline std::string format_multi_index(const MultiIndex& alpha) {
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(alpha[i]);
  }
  return out;
}

// Parses "a1,a2,...,as" with nonnegative integer entries.  When expected_size
// is nonnegative the length must match.
inline MultiIndex parse_multi_index(const std::string& text, int expected_size = -1) {
  MultiIndex alpha;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    const std::string piece = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (piece.empty() || piece.size() > 9 ||
        piece.find_first_not_of("0123456789") != std::string::npos)
      throw SchemaError("multi-index entry '" + piece + "' is not a small nonnegative integer");
    alpha.push_back(std::stoi(piece));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (expected_size >= 0 && static_cast<int>(alpha.size()) != expected_size)
    throw SchemaError("multi-index has " + std::to_string(alpha.size()) + " entries, expected " +
                      std::to_string(expected_size));
  return alpha;
}

// Urn spec document: { "R": [[...], ...], "X0": [...], "name": string? }.
inline UrnSpec urn_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("urn spec must be a JSON object");
  if (!j.contains("R")) throw SchemaError("urn spec is missing the replacement matrix field R");
  if (!j.contains("X0")) throw SchemaError("urn spec is missing the initial composition field X0");
  const nlohmann::json& r = j.at("R");
  const nlohmann::json& x0 = j.at("X0");
  if (!r.is_array() || r.empty()) throw SchemaError("R must be a nonempty array of rows");
  const int s = static_cast<int>(r.size());
  UrnSpec spec;
  spec.replacement = Mat<double>(s, s);
  for (int i = 0; i < s; ++i) {
    const nlohmann::json& row = r.at(static_cast<std::size_t>(i));
    if (!row.is_array())
      throw SchemaError("row " + std::to_string(i + 1) + " of R is not an array");
    if (static_cast<int>(row.size()) != s)
      throw SchemaError("row " + std::to_string(i + 1) + " of R has " +
                        std::to_string(row.size()) + " entries, expected " + std::to_string(s));
    for (int k = 0; k < s; ++k)
      spec.replacement(i, k) = detail::require_number(
          row.at(static_cast<std::size_t>(k)),
          "R[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) + "]");
  }
  if (!x0.is_array() || static_cast<int>(x0.size()) != s)
    throw SchemaError("X0 must be an array with one entry per color");
  spec.initial.resize(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i)
    spec.initial[static_cast<std::size_t>(i)] =
        detail::require_number(x0.at(static_cast<std::size_t>(i)), "X0[" + std::to_string(i + 1) + "]");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw SchemaError("name must be a string");
    spec.name = j.at("name").get<std::string>();
  }
  return spec;
}

inline nlohmann::json urn_spec_to_json(const UrnSpec& spec) {
  nlohmann::json r = nlohmann::json::array();
  for (int i = 0; i < spec.colors(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < spec.colors(); ++k) row.push_back(spec.replacement(i, k));
    r.push_back(std::move(row));
  }
  nlohmann::json out{{"R", std::move(r)}, {"X0", spec.initial}};
  if (!spec.name.empty()) out["name"] = spec.name;
  return out;
}

inline UrnSpec load_urn_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open urn spec file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("cannot parse " + path + ": " + e.what());
  }
  UrnSpec spec = urn_spec_from_json(j);
  if (spec.name.empty()) {
    const std::size_t slash = path.find_last_of("/\\");
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    const std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem.resize(dot);
    spec.name = stem;
  }
  return spec;
}

inline void save_urn_spec(const UrnSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write urn spec file: " + path);
  out << urn_spec_to_json(spec).dump(2) << '\n';
}

// Classification report: eigenvalues ordered as in the decomposition, the
// class name, sigma2 (null for single-color urns), d, nu, the stationary
// direction v1, and the Jordan block layout.
template <class R>
nlohmann::json classification_json(const SpectralDecomposition<R>& dec,
                                   const UrnClassification<R>& cls) {
  nlohmann::json lambda = nlohmann::json::array();
  for (const Cx<R>& ev : dec.eigenvalues) lambda.push_back(complex_pair(ev));
  nlohmann::json v1 = nlohmann::json::array();
  for (int i = 0; i < dec.s; ++i) v1.push_back(approx(dec.v(i, 0).re));
  nlohmann::json blocks = nlohmann::json::array();
  for (const JordanBlockInfo<R>& blk : dec.blocks)
    blocks.push_back(nlohmann::json{{"eigenvalue", complex_pair(blk.eigenvalue)},
                                    {"first", blk.first},
                                    {"size", blk.size}});
  nlohmann::json out{{"lambda", std::move(lambda)},
                     {"class", to_string(cls.kind)},
                     {"d", cls.d},
                     {"nu", cls.nu},
                     {"v1", std::move(v1)},
                     {"blocks", std::move(blocks)}};
  out["sigma2"] = cls.has_sigma2 ? nlohmann::json(approx(cls.sigma2)) : nlohmann::json(nullptr);
  return out;
}

// Trajectory CSV: header n,x_1,..,x_s and one row per recorded time.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int s = traj.x.empty() ? 0 : static_cast<int>(traj.x.front().size());
  out << 'n';
  for (int i = 1; i <= s; ++i) out << ",x_" << i;
  out << '\n';
  for (std::size_t row = 0; row < traj.n.size(); ++row) {
    out << traj.n[row];
    for (int i = 0; i < s; ++i)
      out << ',' << detail::csv_number(traj.x[row][static_cast<std::size_t>(i)]);
    out << '\n';
  }
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  return out.str();
}

// Moment series CSV: n, value, reference bound n^e log^l(n+2), the ratio
// |value| / bound, and the standard error (zero for exact series).
inline void write_moment_csv(std::ostream& out, const MomentSeries<double>& series,
                             double exponent, double log_exponent,
                             const std::vector<double>& std_errors = {}) {
  if (!std_errors.empty() && std_errors.size() != series.n.size())
    throw std::invalid_argument("write_moment_csv: one standard error per grid point required");
  out << "n,value,bound,ratio,stderr\n";
  for (std::size_t i = 0; i < series.n.size(); ++i) {
    const double bound = growth_bound(series.n[i], exponent, log_exponent);
    const double value = series.values[i].re;
    const double ratio = bound > 0.0 ? mag(series.values[i]) / bound : 0.0;
    out << series.n[i] << ',' << detail::csv_number(value) << ',' << detail::csv_number(bound)
        << ',' << detail::csv_number(ratio) << ','
        << detail::csv_number(std_errors.empty() ? 0.0 : std_errors[i]) << '\n';
  }
}

inline std::string moment_csv(const MomentSeries<double>& series, double exponent,
                              double log_exponent, const std::vector<double>& std_errors = {}) {
  std::ostringstream out;
  write_moment_csv(out, series, exponent, log_exponent, std_errors);
  return out.str();
}

}  // namespace urnlab
