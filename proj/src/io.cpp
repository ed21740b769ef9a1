// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include "sphot/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sphot/error.hpp"
#include "sphot/geometry.hpp"

namespace sphot {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::FileError, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad())
    throw Error(ErrorCode::FileError, "cannot read '" + path + "'");
  return buf.str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::FileError, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out)
    throw Error(ErrorCode::FileError, "cannot write '" + path + "'");
}

std::vector<std::string> read_lines(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, const std::string& where) {
  if (s.empty())
    throw Error(ErrorCode::InvalidArgument, where + ": empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw Error(ErrorCode::InvalidArgument,
                where + ": bad numeric field '" + s + "'");
  return v;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_id(const std::string& id, const std::string& where) {
  if (id.empty())
    throw Error(ErrorCode::InvalidArgument, where + ": empty id");
  if (id.find(',') != std::string::npos ||
      id.find('\n') != std::string::npos || id.find('\r') != std::string::npos)
    throw Error(ErrorCode::InvalidArgument,
                where + ": id '" + id + "' contains a delimiter");
}

/// Rows more than 1e-6 off unit norm are re-normalized; beyond 1e-4 a
/// warning is printed. Well-formed payloads pass through untouched, which
/// keeps binary round-trips bit-exact.
void normalize_loaded_rows(Eigen::MatrixXd& m, const std::string& path) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (std::abs(norm - 1.0) <= kUnitNormTol) continue;
    if (norm < kZeroNormTol)
      throw Error(ErrorCode::ZeroVector,
                  path + ": row " + std::to_string(i) + " has zero norm");
    if (std::abs(norm - 1.0) > 1e-4)
      std::fprintf(stderr,
                   "WARNING: %s: row %lld norm %.6g re-normalized on load\n",
                   path.c_str(), static_cast<long long>(i), norm);
    m.row(i) /= norm;
  }
}

EmbeddingSet read_embeddings_binary(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::BadMagic, path + ": missing EMB1 magic");
  if (bytes.size() < 12)
    throw Error(ErrorCode::TruncatedPayload, path + ": truncated header");
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t n = get_u32(p + 4);
  const std::uint32_t d = get_u32(p + 8);
  const std::size_t expected =
      12 + static_cast<std::size_t>(n) * static_cast<std::size_t>(d) * 4;
  if (bytes.size() < expected)
    throw Error(ErrorCode::TruncatedPayload,
                path + ": payload holds " + std::to_string(bytes.size() - 12) +
                    " bytes, expected " + std::to_string(expected - 12));
  if (bytes.size() > expected)
    throw Error(ErrorCode::TruncatedPayload,
                path + ": trailing bytes after payload");

  EmbeddingSet set;
  set.vectors.resize(n, d);
  const unsigned char* payload = p + 12;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      const std::uint32_t raw =
          get_u32(payload + (static_cast<std::size_t>(i) * d + j) * 4);
      float f;
      std::memcpy(&f, &raw, 4);
      set.vectors(i, j) = static_cast<double>(f);
    }
  }

  const std::vector<std::string> lines = read_lines(path + ".ids");
  if (lines.size() != n)
    throw Error(ErrorCode::IdCountMismatch,
                path + ".ids: " + std::to_string(lines.size()) +
                    " ids for " + std::to_string(n) + " rows");
  set.ids = lines;
  normalize_loaded_rows(set.vectors, path);
  set.validate();
  return set;
}

void write_embeddings_binary(const EmbeddingSet& set,
                             const std::string& path) {
  std::string bytes;
  bytes.reserve(12 + static_cast<std::size_t>(set.vectors.size()) * 4);
  bytes.append(kMagic, 4);
  put_u32(bytes, static_cast<std::uint32_t>(set.vectors.rows()));
  put_u32(bytes, static_cast<std::uint32_t>(set.vectors.cols()));
  for (Eigen::Index i = 0; i < set.vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < set.vectors.cols(); ++j) {
      const float f = static_cast<float>(set.vectors(i, j));
      std::uint32_t raw;
      std::memcpy(&raw, &f, 4);
      put_u32(bytes, raw);
    }
  }
  write_file_bytes(path, bytes);

  std::string ids;
  for (const std::string& id : set.ids) {
    check_id(id, path);
    ids += id;
    ids += '\n';
  }
  write_file_bytes(path + ".ids", ids);
}

EmbeddingSet read_embeddings_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty())
    throw Error(ErrorCode::InvalidArgument, path + ": empty CSV");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "id")
    throw Error(ErrorCode::InvalidArgument,
                path + ": expected header 'id,c0,...'");
  const std::size_t d = header.size() - 1;

  EmbeddingSet set;
  set.vectors.resize(static_cast<Eigen::Index>(lines.size() - 1),
                     static_cast<Eigen::Index>(d));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> fields = split_csv_line(lines[r]);
    if (fields.size() != d + 1)
      throw Error(ErrorCode::InvalidArgument,
                  path + ": row " + std::to_string(r) + " has " +
                      std::to_string(fields.size() - 1) + " values, expected " +
                      std::to_string(d));
    set.ids.push_back(fields[0]);
    for (std::size_t j = 0; j < d; ++j)
      set.vectors(static_cast<Eigen::Index>(r - 1),
                  static_cast<Eigen::Index>(j)) =
          parse_double(fields[j + 1], path);
  }
  normalize_loaded_rows(set.vectors, path);
  set.validate();
  return set;
}

void write_embeddings_csv(const EmbeddingSet& set, const std::string& path) {
  std::string out = "id";
  for (Eigen::Index j = 0; j < set.vectors.cols(); ++j)
    out += ",c" + std::to_string(j);
  out += '\n';
  for (Eigen::Index i = 0; i < set.vectors.rows(); ++i) {
    const std::string& id = set.ids[static_cast<std::size_t>(i)];
    check_id(id, path);
    out += id;
    for (Eigen::Index j = 0; j < set.vectors.cols(); ++j) {
      out += ',';
      out += format_g17(set.vectors(i, j));
    }
    out += '\n';
  }
  write_file_bytes(path, out);
}

}  // namespace

EmbeddingSet read_embeddings(const std::string& path) {
  return has_suffix(path, ".csv") ? read_embeddings_csv(path)
                                  : read_embeddings_binary(path);
}

void write_embeddings(const EmbeddingSet& set, const std::string& path) {
  if (set.ids.size() != static_cast<std::size_t>(set.vectors.rows()))
    throw Error(ErrorCode::IdCountMismatch,
                path + ": " + std::to_string(set.ids.size()) + " ids for " +
                    std::to_string(set.vectors.rows()) + " rows");
  if (has_suffix(path, ".csv")) {
    write_embeddings_csv(set, path);
  } else {
    write_embeddings_binary(set, path);
  }
}

PrototypeSet read_prototypes(const std::string& path) {
  const EmbeddingSet set = read_embeddings(path);
  PrototypeSet out;
  out.labels = set.ids;
  out.vectors = set.vectors;
  out.validate();
  return out;
}

void write_prototypes(const PrototypeSet& set, const std::string& path) {
  EmbeddingSet as_embeddings;
  as_embeddings.ids = set.labels;
  as_embeddings.vectors = set.vectors;
  write_embeddings(as_embeddings, path);
}

LabeledMatrix read_matrix_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty())
    throw Error(ErrorCode::InvalidArgument, path + ": empty CSV");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.empty() || header[0].empty())
    throw Error(ErrorCode::InvalidArgument, path + ": missing header");

  LabeledMatrix m;
  m.corner = header[0];
  m.col_ids.assign(header.begin() + 1, header.end());
  const std::size_t cols = m.col_ids.size();
  m.values.resize(static_cast<Eigen::Index>(lines.size() - 1),
                  static_cast<Eigen::Index>(cols));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> fields = split_csv_line(lines[r]);
    if (fields.size() != cols + 1)
      throw Error(ErrorCode::InvalidArgument,
                  path + ": row " + std::to_string(r) + " has " +
                      std::to_string(fields.size() - 1) + " values, expected " +
                      std::to_string(cols));
    m.row_ids.push_back(fields[0]);
    for (std::size_t j = 0; j < cols; ++j)
      m.values(static_cast<Eigen::Index>(r - 1),
               static_cast<Eigen::Index>(j)) =
          parse_double(fields[j + 1], path);
  }
  return m;
}

void write_matrix_csv(const LabeledMatrix& m, const std::string& path) {
  if (m.row_ids.size() != static_cast<std::size_t>(m.values.rows()) ||
      m.col_ids.size() != static_cast<std::size_t>(m.values.cols()))
    throw Error(ErrorCode::IndexMismatch,
                path + ": id counts do not match matrix shape");
  check_id(m.corner, path);
  std::string out = m.corner;
  for (const std::string& c : m.col_ids) {
    check_id(c, path);
    out += ',';
    out += c;
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    const std::string& id = m.row_ids[static_cast<std::size_t>(i)];
    check_id(id, path);
    out += id;
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      out += ',';
      out += format_g17(m.values(i, j));
    }
    out += '\n';
  }
  write_file_bytes(path, out);
}

ScoreMatrix read_scores(const std::string& path) {
  LabeledMatrix m = read_matrix_csv(path);
  ScoreMatrix scores;
  scores.item_ids = std::move(m.row_ids);
  scores.labels = std::move(m.col_ids);
  scores.scores = std::move(m.values);
  scores.validate();
  return scores;
}

void write_scores(const ScoreMatrix& scores, const std::string& path) {
  LabeledMatrix m;
  m.corner = "item";
  m.row_ids = scores.item_ids;
  m.col_ids = scores.labels;
  m.values = scores.scores;
  write_matrix_csv(m, path);
}

LikelihoodMatrix read_likelihoods(const std::string& path) {
  LabeledMatrix m = read_matrix_csv(path);
  LikelihoodMatrix lik;
  lik.video_ids = std::move(m.row_ids);
  lik.object_ids = std::move(m.col_ids);
  lik.p = std::move(m.values);
  lik.validate();
  return lik;
}

void write_likelihoods(const LikelihoodMatrix& lik, const std::string& path) {
  LabeledMatrix m;
  m.corner = "video";
  m.row_ids = lik.video_ids;
  m.col_ids = lik.object_ids;
  m.values = lik.p;
  write_matrix_csv(m, path);
}

void write_coupling(const Eigen::MatrixXd& coupling,
                    const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids,
                    const std::string& path) {
  LabeledMatrix m;
  m.corner = "label";
  m.row_ids = row_ids;
  m.col_ids = col_ids;
  m.values = coupling;
  write_matrix_csv(m, path);
}

TruthMap read_truth(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != "item,label")
    throw Error(ErrorCode::InvalidArgument,
                path + ": expected header 'item,label'");
  TruthMap truth;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const std::vector<std::string> fields = split_csv_line(lines[r]);
    if (fields.size() != 2)
      throw Error(ErrorCode::InvalidArgument,
                  path + ": row " + std::to_string(r) + " is not 'item,label'");
    if (!truth.emplace(fields[0], fields[1]).second)
      throw Error(ErrorCode::InvalidArgument,
                  path + ": duplicate item '" + fields[0] + "'");
  }
  return truth;
}

void write_truth(const TruthMap& truth, const std::string& path) {
  std::string out = "item,label\n";
  for (const auto& [item, label] : truth) {
    check_id(item, path);
    check_id(label, path);
    out += item;
    out += ',';
    out += label;
    out += '\n';
  }
  write_file_bytes(path, out);
}

std::string read_text(const std::string& path) { return read_file_bytes(path); }

void write_text(const std::string& text, const std::string& path) {
  write_file_bytes(path, text);
}

RawConfig read_config(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  RawConfig raw;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto not_space = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), not_space));
    line.erase(std::find_if(line.rbegin(), line.rend(), not_space).base(),
               line.end());
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::InvalidConfig,
                  path + ": line " + std::to_string(i + 1) +
                      " is not 'key=value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), not_space).base(),
              key.end());
    value.erase(value.begin(),
                std::find_if(value.begin(), value.end(), not_space));
    if (!raw.emplace(key, value).second)
      throw Error(ErrorCode::InvalidConfig,
                  path + ": duplicate key '" + key + "'");
  }
  return raw;
}

namespace {

int config_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    throw Error(ErrorCode::InvalidConfig,
                "config: key '" + key + "' has non-integer value '" + value +
                    "'");
  return static_cast<int>(v);
}

std::uint64_t config_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    throw Error(ErrorCode::InvalidConfig,
                "config: key '" + key + "' has non-integer value '" + value +
                    "'");
  return static_cast<std::uint64_t>(v);
}

double config_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw Error(ErrorCode::InvalidConfig,
                "config: key '" + key + "' has non-numeric value '" + value +
                    "'");
  return v;
}

bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::InvalidConfig,
              "config: key '" + key + "' has non-boolean value '" + value +
                  "'");
}

}  // namespace

ObjectFilter Settings::object_filter() const {
  if (filter_mode == "tau") return ThresholdFilter{tau};
  return TopNFilter{top_n_objects};
}

Settings parse_settings(const RawConfig& raw) {
  Settings s;
  for (const auto& [key, value] : raw) {
    if (key == "k") {
      s.pipeline.k = config_int(key, value);
    } else if (key == "lambda") {
      s.pipeline.lambda = config_double(key, value);
    } else if (key == "tau") {
      s.tau = config_double(key, value);
    } else if (key == "top_n_objects") {
      s.top_n_objects = config_int(key, value);
    } else if (key == "top_t") {
      s.pipeline.top_objects = config_int(key, value);
    } else if (key == "epsilon") {
      s.pipeline.epsilon_fusion = config_double(key, value);
    } else if (key == "seed") {
      s.pipeline.seed = config_u64(key, value);
      s.synth.seed = s.pipeline.seed;
    } else if (key == "frechet_distance") {
      if (value == "cosine") {
        s.pipeline.frechet_distance = SphereDistance::Cosine;
      } else if (value == "arc") {
        s.pipeline.frechet_distance = SphereDistance::Arc;
      } else {
        throw Error(ErrorCode::InvalidConfig,
                    "config: frechet_distance must be 'cosine' or 'arc'");
      }
    } else if (key == "fusion_norm") {
      if (value == "minmax") {
        s.pipeline.fusion_norm = FusionNorm::MinMax;
      } else if (value == "zscore") {
        s.pipeline.fusion_norm = FusionNorm::ZScore;
      } else if (value == "none") {
        s.pipeline.fusion_norm = FusionNorm::None;
      } else {
        throw Error(ErrorCode::InvalidConfig,
                    "config: fusion_norm must be 'minmax', 'zscore' or 'none'");
      }
    } else if (key == "filter_mode") {
      if (value != "topn" && value != "tau")
        throw Error(ErrorCode::InvalidConfig,
                    "config: filter_mode must be 'topn' or 'tau'");
      s.filter_mode = value;
    } else if (key == "action_weighting") {
      if (value == "inverse") {
        s.pipeline.action_weighting = ActionWeighting::Inverse;
      } else if (value == "uniform") {
        s.pipeline.action_weighting = ActionWeighting::Uniform;
      } else {
        throw Error(ErrorCode::InvalidConfig,
                    "config: action_weighting must be 'inverse' or 'uniform'");
      }
    } else if (key == "object_weighting") {
      if (value == "transductive") {
        s.pipeline.object_weighting = ObjectWeighting::Transductive;
      } else if (value == "uniform") {
        s.pipeline.object_weighting = ObjectWeighting::Uniform;
      } else {
        throw Error(ErrorCode::InvalidConfig,
                    "config: object_weighting must be 'transductive' or "
                    "'uniform'");
      }
    } else if (key == "video_weighting") {
      if (value == "uniform") {
        s.pipeline.video_weighting = VideoWeighting::Uniform;
      } else if (value == "size") {
        s.pipeline.video_weighting = VideoWeighting::SizeProportional;
      } else {
        throw Error(ErrorCode::InvalidConfig,
                    "config: video_weighting must be 'uniform' or 'size'");
      }
    } else if (key == "select_with_original") {
      s.pipeline.select_top_objects_with_original = config_bool(key, value);
    } else if (key == "synth_classes") {
      s.synth.n_classes = config_int(key, value);
    } else if (key == "synth_items") {
      s.synth.n_items_per_class = config_int(key, value);
    } else if (key == "synth_dim") {
      s.synth.dim = config_int(key, value);
    } else if (key == "synth_kappa") {
      s.synth.kappa = config_double(key, value);
    } else if (key == "synth_bias") {
      s.synth.bias_angle = config_double(key, value);
    } else if (key == "synth_imbalance") {
      s.synth.imbalance = config_double(key, value);
    } else if (key == "synth_objects") {
      s.synth.with_objects = config_bool(key, value);
    } else if (key == "synth_object_count") {
      s.synth.n_objects = config_int(key, value);
    } else if (key == "synth_noise") {
      s.synth.likelihood_noise = config_double(key, value);
    } else {
      throw Error(ErrorCode::InvalidConfig,
                  "config: unknown key '" + key + "'");
    }
  }
  s.pipeline.object_filter = s.object_filter();
  return s;
}

Settings load_settings(const std::string& path) {
  return parse_settings(read_config(path));
}

}  // namespace sphot
