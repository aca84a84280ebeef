#include "bftopt/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bftopt/rng.hpp"

namespace bftopt {

namespace {

std::vector<double> parse_row(const std::string& line, int line_number) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    std::string field = line.substr(pos, comma - pos);
    // trim
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    field = first == std::string::npos ? std::string() : field.substr(first, last - first + 1);
    if (field.empty()) {
      throw DatasetError("line " + std::to_string(line_number) + ": empty field");
    }
    try {
      std::size_t consumed = 0;
      const double v = std::stod(field, &consumed);
      if (consumed != field.size()) throw std::invalid_argument(field);
      values.push_back(v);
    } catch (const std::exception&) {
      throw DatasetError("line " + std::to_string(line_number) + ": cannot parse '" + field +
                         "' as a number");
    }
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return values;
}

}  // namespace

std::vector<QuadraticCost> load_dataset(const std::filesystem::path& path,
                                        const DatasetOptions& options) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file: " + path.string());

  std::vector<QuadraticCost> costs;
  std::string line;
  int line_number = 0;
  int columns = -1;
  bool skipped_header = !options.header;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    const auto values = parse_row(line, line_number);
    if (values.size() < 2) {
      throw DatasetError("line " + std::to_string(line_number) +
                         ": need at least one coefficient and a response");
    }
    if (columns < 0) {
      columns = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != columns) {
      throw DatasetError("line " + std::to_string(line_number) + ": expected " +
                         std::to_string(columns) + " columns, found " +
                         std::to_string(values.size()));
    }
    Vector row(columns - 1);
    for (int k = 0; k + 1 < columns; ++k) row(k) = values[k];
    try {
      costs.emplace_back(std::move(row), values.back());
    } catch (const std::invalid_argument& e) {
      throw DatasetError("line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (costs.empty()) throw DatasetError("dataset is empty: " + path.string());
  return costs;
}

void save_dataset(const std::filesystem::path& path, std::span<const QuadraticCost> costs) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write dataset file: " + path.string());
  std::ostringstream line;
  line.precision(17);
  for (const auto& c : costs) {
    line.str("");
    for (Eigen::Index k = 0; k < c.row().size(); ++k) line << c.row()(k) << ',';
    line << c.response();
    out << line.str() << '\n';
  }
  if (!out) throw DatasetError("failed writing dataset file: " + path.string());
}

SyntheticDataset generate_synthetic(int n, int d, double noise_std, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("generate_synthetic: d must be >= 1");
  if (n <= d) throw std::invalid_argument("generate_synthetic: requires n > d");
  if (noise_std < 0.0) throw std::invalid_argument("generate_synthetic: noise_std must be >= 0");

  SyntheticDataset dataset;
  dataset.ground_truth = Vector::Ones(d);

  CounterRng row_rng(splitmix64(seed ^ 0x726f7773ULL));
  CounterRng noise_rng(splitmix64(seed ^ 0x6e6f697365ULL));

  for (int i = 0; i < n; ++i) {
    Vector row(d);
    if (d == 1) {
      row(0) = 1.0;
    } else if (d == 2) {
      // Evenly spaced directions over the half circle; antipodal rows would
      // add no rank, so the full circle is not needed.
      const double angle = M_PI * static_cast<double>(i) / static_cast<double>(n);
      row << std::cos(angle), std::sin(angle);
    } else {
      do {
        for (int k = 0; k < d; ++k) row(k) = row_rng.next_gaussian(0.0, 1.0);
      } while (row.norm() < 1e-6);
      row.normalize();
    }
    const double noise = noise_std > 0.0 ? noise_rng.next_gaussian(0.0, noise_std) : 0.0;
    const double response = row.dot(dataset.ground_truth) + noise;
    dataset.costs.emplace_back(std::move(row), response);
  }
  return dataset;
}

}  // namespace bftopt
