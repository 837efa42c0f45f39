#include "unlearn/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace unlearn {

namespace {

constexpr std::uint32_t kSnapshotMagic = 0x4d504c55u;  // "ULPM"
constexpr std::uint32_t kSnapshotVersion = 1;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, const std::filesystem::path& path,
                    std::size_t line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::runtime_error("read_dataset_csv: bad number '" + token +
                             "' at " + path.string() + ":" +
                             std::to_string(line_no));
  return value;
}

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("load_precomputed: truncated snapshot");
  return value;
}

void write_array(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void read_array(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("load_precomputed: truncated snapshot");
}

}  // namespace

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  validate(data);
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_dataset_csv: cannot open " + path.string());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.d(); ++j)
      out << format_double(data.features(i, j)) << ',';
    out << format_double(data.responses(i)) << '\n';
  }
  if (!out)
    throw std::runtime_error("write_dataset_csv: write failed for " +
                             path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path,
                         double ridge_lambda) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_dataset_csv: cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ','))
      row.push_back(parse_double(token, path, line_no));
    if (row.size() < 2)
      throw std::runtime_error(
          "read_dataset_csv: need at least one feature and a response at " +
          path.string() + ":" + std::to_string(line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_dataset_csv: inconsistent column count at " +
                               path.string() + ":" + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::runtime_error("read_dataset_csv: no data rows in " +
                             path.string());

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Dataset data;
  data.features.resize(n, d);
  data.responses.resize(n);
  data.ridge_lambda = ridge_lambda;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      data.features(i, j) = rows[static_cast<std::size_t>(i)]
                                [static_cast<std::size_t>(j)];
    data.responses(i) =
        rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  }
  validate(data);
  return data;
}

void save_precomputed(const PrecomputedModel& model,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("save_precomputed: cannot open " + path.string());

  const Dataset& data = *model.data;
  write_raw(out, kSnapshotMagic);
  write_raw(out, kSnapshotVersion);
  write_raw(out, static_cast<std::int64_t>(data.n()));
  write_raw(out, static_cast<std::int64_t>(data.d()));
  write_raw(out, static_cast<std::uint8_t>(data.has_weights() ? 1 : 0));
  write_raw(out, data.ridge_lambda);

  const std::size_t n = static_cast<std::size_t>(data.n());
  const std::size_t d = static_cast<std::size_t>(data.d());
  write_array(out, data.features.data(), n * d);
  write_array(out, data.responses.data(), n);
  if (data.has_weights()) write_array(out, data.weights.data(), n);
  write_array(out, model.theta_full.data(), d);
  write_array(out, model.residuals.data(), n);
  write_array(out, model.inv_hessian.data(), d * d);
  write_array(out, model.hat.data(), n * n);
  if (!out)
    throw std::runtime_error("save_precomputed: write failed for " +
                             path.string());
}

PrecomputedModel load_precomputed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("load_precomputed: cannot open " + path.string());

  if (read_raw<std::uint32_t>(in) != kSnapshotMagic)
    throw std::runtime_error("load_precomputed: not a model snapshot: " +
                             path.string());
  if (read_raw<std::uint32_t>(in) != kSnapshotVersion)
    throw std::runtime_error("load_precomputed: unsupported snapshot version");

  const auto n = static_cast<Eigen::Index>(read_raw<std::int64_t>(in));
  const auto d = static_cast<Eigen::Index>(read_raw<std::int64_t>(in));
  if (n < 1 || d < 1)
    throw std::runtime_error("load_precomputed: corrupt snapshot header");
  const bool has_weights = read_raw<std::uint8_t>(in) != 0;

  auto data = std::make_shared<Dataset>();
  data->ridge_lambda = read_raw<double>(in);
  data->features.resize(n, d);
  data->responses.resize(n);
  read_array(in, data->features.data(),
             static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  read_array(in, data->responses.data(), static_cast<std::size_t>(n));
  if (has_weights) {
    data->weights.resize(n);
    read_array(in, data->weights.data(), static_cast<std::size_t>(n));
  }

  PrecomputedModel model;
  model.theta_full.resize(d);
  model.residuals.resize(n);
  model.inv_hessian.resize(d, d);
  model.hat.resize(n, n);
  read_array(in, model.theta_full.data(), static_cast<std::size_t>(d));
  read_array(in, model.residuals.data(), static_cast<std::size_t>(n));
  read_array(in, model.inv_hessian.data(),
             static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  read_array(in, model.hat.data(),
             static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  model.data = std::move(data);
  return model;
}

}  // namespace unlearn
