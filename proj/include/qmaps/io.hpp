#ifndef QMAPS_IO_HPP
#define QMAPS_IO_HPP

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmaps/core.hpp"
#include "qmaps/states.hpp"

namespace qmaps {

//=========================================================================
// Diagnostic logging (QMAPS_LOG = quiet | info | debug)
//=========================================================================

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char *env = std::getenv("QMAPS_LOG");
    if (!env)
      return LogLevel::Info;
    const std::string s(env);
    if (s == "quiet")
      return LogLevel::Quiet;
    if (s == "debug")
      return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

inline void log_info(const std::string &msg) {
  if (log_level() >= LogLevel::Info)
    std::fprintf(stderr, "[qmaps] %s\n", msg.c_str());
}

inline void log_debug(const std::string &msg) {
  if (log_level() >= LogLevel::Debug)
    std::fprintf(stderr, "[qmaps:debug] %s\n", msg.c_str());
}

//=========================================================================
// Number formatting: 17 significant digits round-trips doubles exactly
//=========================================================================

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

//=========================================================================
// Atomic file writes (temp + rename)
//=========================================================================

inline void write_file_atomic(const std::string &path,
                              const std::string &contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot open " + tmp + " for writing");
    out << contents;
    if (!out.good())
      throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

/// Paths must be writable before any compute starts.
inline void check_writable(const std::string &path) {
  const std::string probe = path + ".tmp";
  std::ofstream out(probe, std::ios::binary);
  if (!out)
    throw std::runtime_error("output path not writable: " + path);
  out.close();
  std::filesystem::remove(probe);
}

//=========================================================================
// The .qm state file format
//=========================================================================
//
// A single UTF-8 JSON object with keys, in order: dim_s, dim_e (integers)
// and re, im (row-major arrays of (dim_s*dim_e)^2 reals each).  Used for
// both states and unitaries on the joint space.

inline std::string qm_to_string(const Matrix &m, Eigen::Index dim_s,
                                Eigen::Index dim_e) {
  check_bipartite_dims(m, dim_s, dim_e, "qm_to_string");
  nlohmann::ordered_json j;
  j["dim_s"] = dim_s;
  j["dim_e"] = dim_e;
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

struct QmFile {
  Matrix matrix;
  Eigen::Index dim_s;
  Eigen::Index dim_e;
};

inline QmFile qm_from_string(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument(std::string("qm parse error: ") + e.what());
  }
  if (!j.contains("dim_s") || !j.contains("dim_e") || !j.contains("re") ||
      !j.contains("im"))
    throw std::invalid_argument("qm file missing one of dim_s/dim_e/re/im");
  const Eigen::Index ds = j["dim_s"].get<Eigen::Index>();
  const Eigen::Index de = j["dim_e"].get<Eigen::Index>();
  if (ds < 1 || de < 1)
    throw std::invalid_argument("qm file has non-positive dimensions");
  const Eigen::Index n = ds * de;
  const auto re = j["re"].get<std::vector<double>>();
  const auto im = j["im"].get<std::vector<double>>();
  if (static_cast<Eigen::Index>(re.size()) != n * n ||
      static_cast<Eigen::Index>(im.size()) != n * n)
    throw std::invalid_argument("qm file arrays must have " +
                                std::to_string(n * n) + " entries");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = Complex(re[r * n + c], im[r * n + c]);
  require_finite(m, "qm file");
  return {std::move(m), ds, de};
}

inline void save_state(const std::string &path, const BipartiteState &rho) {
  write_file_atomic(path, qm_to_string(rho.mat(), rho.dim_s, rho.dim_e));
}

inline BipartiteState load_state(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open state file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  QmFile f = qm_from_string(ss.str());
  return BipartiteState(DensityMatrix(std::move(f.matrix)), f.dim_s, f.dim_e);
}

inline Matrix load_unitary(const std::string &path, Eigen::Index dim_s,
                           Eigen::Index dim_e) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open unitary file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  QmFile f = qm_from_string(ss.str());
  if (f.dim_s != dim_s || f.dim_e != dim_e)
    throw std::invalid_argument("unitary file dimensions (" +
                                std::to_string(f.dim_s) + "," +
                                std::to_string(f.dim_e) +
                                ") do not match the state");
  if (!is_unitary(f.matrix))
    throw std::invalid_argument("unitary file does not contain a unitary "
                                "matrix");
  return std::move(f.matrix);
}

//=========================================================================
// CSV emission: header always present, comma delimiter, LF line endings
//=========================================================================

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header)
      : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i)
        body_ += ',';
      body_ += header[i];
    }
    body_ += '\n';
  }

  class Row {
  public:
    explicit Row(CsvWriter &w) : writer_(w) {}
    Row &add(double v) { return add_raw(format_double(v)); }
    Row &add(const std::string &v) { return add_raw(v); }
    Row &add(std::uint64_t v) { return add_raw(std::to_string(v)); }
    Row &add(Eigen::Index v) { return add_raw(std::to_string(v)); }
    ~Row() { writer_.end_row(count_); }

  private:
    Row &add_raw(const std::string &s) {
      if (count_)
        writer_.body_ += ',';
      writer_.body_ += s;
      ++count_;
      return *this;
    }
    CsvWriter &writer_;
    std::size_t count_ = 0;
  };

  Row row() { return Row(*this); }

  const std::string &str() const { return body_; }
  void save(const std::string &path) const { write_file_atomic(path, body_); }

private:
  void end_row(std::size_t count) {
    if (count != columns_)
      throw std::logic_error("CSV row has " + std::to_string(count) +
                             " cells, expected " + std::to_string(columns_));
    body_ += '\n';
  }

  std::size_t columns_;
  std::string body_;
};

} // namespace qmaps

#endif // QMAPS_IO_HPP
