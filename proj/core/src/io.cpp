#include "lowercs/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "lowercs/error.hpp"

namespace lowercs {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw DataError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::uint64_t parse_unsigned(std::string_view text) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw DataError("not a nonnegative integer: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

void write_index_set(std::ostream& out, const IndexSet& set) {
  out << "d=" << set.dimension() << '\n';
  for (const auto& nu : set) {
    for (std::size_t k = 0; k < nu.dim(); ++k) out << (k ? " " : "") << nu[k];
    out << '\n';
  }
}

IndexSet read_index_set(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty index-set stream");
  std::string_view head = chomp(line);
  if (head.substr(0, 2) != "d=") throw DataError("index-set header must be 'd=<int>'");
  const std::size_t d = parse_unsigned(head.substr(2));
  if (d == 0) throw DataError("index-set dimension must be at least 1");
  std::vector<MultiIndex> members;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = chomp(line);
    if (text.empty()) continue;
    std::vector<Degree> degrees;
    for (std::string_view tok : split(text, ' ')) {
      if (tok.empty()) continue;
      const std::uint64_t v = parse_unsigned(tok);
      if (v > std::numeric_limits<Degree>::max()) throw DataError("degree too large");
      degrees.push_back(static_cast<Degree>(v));
    }
    if (degrees.size() != d) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(degrees.size()) +
                      " entries, expected " + std::to_string(d));
    }
    members.emplace_back(std::move(degrees));
  }
  const std::size_t count = members.size();
  IndexSet set(d, std::move(members));
  if (set.size() != count) throw DataError("index-set stream contains duplicates");
  return set;
}

void write_samples_csv(std::ostream& out, const SampleSet& samples) {
  for (std::size_t k = 0; k < samples.dimension(); ++k) out << (k ? ",y" : "y") << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto p = samples.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << format_double(p[k]);
    out << '\n';
  }
}

SampleSet read_samples_csv(std::istream& in, BasisKind kind, std::uint64_t seed) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty sample stream");
  const std::size_t d = split(chomp(line), ',').size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::string_view text = chomp(line);
    if (text.empty()) continue;
    const auto cells = split(text, ',');
    if (cells.size() != d) throw DataError("sample row " + std::to_string(rows) + " has wrong width");
    for (auto c : cells) values.push_back(parse_double(c));
    ++rows;
  }
  if (rows == 0) throw DataError("sample stream has no rows");
  PointMatrix points = Eigen::Map<PointMatrix>(values.data(), static_cast<Eigen::Index>(rows),
                                               static_cast<Eigen::Index>(d));
  return SampleSet(kind, std::move(points), seed);
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view text = chomp(line);
    if (text.empty() || text.front() == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) throw DataError("expected key=value, got '" + line + "'");
    out.emplace(std::string(text.substr(0, eq)), std::string(text.substr(eq + 1)));
  }
  return out;
}

void write_system(const std::filesystem::path& prefix, const SensingSystem& system,
                  std::uint64_t seed) {
  const auto with_ext = [&](const char* ext) {
    std::filesystem::path p = prefix;
    p += ext;
    return p;
  };
  std::ofstream csv(with_ext(".csv"));
  if (!csv) throw DataError("cannot write " + with_ext(".csv").string());
  const auto& a = system.matrix();
  for (Eigen::Index j = 0; j < a.cols(); ++j) csv << 'a' << j + 1 << ',';
  csv << "g\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) csv << format_double(a(i, j)) << ',';
    csv << format_double(system.observations()[i]) << '\n';
  }
  std::ofstream meta(with_ext(".meta"));
  meta << "kind=" << to_string(system.kind()) << '\n'
       << "seed=" << seed << '\n'
       << "m=" << system.rows() << '\n'
       << "N=" << system.cols() << '\n'
       << "eta=" << format_double(system.eta()) << '\n';
  std::ofstream idx(with_ext(".indexset"));
  write_index_set(idx, system.index_set());
  if (!csv || !meta || !idx) throw DataError("failed writing system files at " + prefix.string());
}

LoadedSystem read_system(const std::filesystem::path& prefix) {
  const auto open = [&](const char* ext) {
    std::filesystem::path p = prefix;
    p += ext;
    std::ifstream in(p);
    if (!in) throw DataError("cannot read " + p.string());
    return in;
  };
  auto meta_in = open(".meta");
  const auto meta = read_key_values(meta_in);
  const auto get = [&](const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw DataError("metadata is missing '" + key + "'");
    return it->second;
  };
  const BasisKind kind = parse_basis_kind(get("kind"));
  const std::uint64_t seed = parse_unsigned(get("seed"));
  const std::size_t m = parse_unsigned(get("m"));
  const std::size_t n = parse_unsigned(get("N"));
  const double eta = parse_double(get("eta"));
  auto idx_in = open(".indexset");
  IndexSet set = read_index_set(idx_in);
  if (set.size() != n) throw DataError("index set size disagrees with metadata");

  auto csv = open(".csv");
  std::string line;
  std::getline(csv, line);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  Eigen::VectorXd g(static_cast<Eigen::Index>(m));
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    std::string_view text = chomp(line);
    if (text.empty()) continue;
    if (row >= m) throw DataError("system CSV has more rows than m");
    const auto cells = split(text, ',');
    if (cells.size() != n + 1) throw DataError("system CSV row has wrong width");
    for (std::size_t j = 0; j < n; ++j) {
      a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = parse_double(cells[j]);
    }
    g[static_cast<Eigen::Index>(row)] = parse_double(cells[n]);
    ++row;
  }
  if (row != m) throw DataError("system CSV has fewer rows than m");
  return LoadedSystem{SensingSystem(kind, std::move(set), std::move(a), std::move(g), eta), seed};
}

std::string recovery_csv_row(const RecoveryReport& report, const SensingSystem& system,
                             const RecoveryRowContext& context) {
  std::ostringstream out;
  out << context.seed << ',' << system.rows() << ',' << system.cols() << ',' << context.s << ','
      << context.weight_mode << ',' << format_double(report.residual_norm) << ','
      << format_double(report.objective) << ','
      << (context.error ? format_double(*context.error) : std::string("")) << ','
      << report.iterations << ',' << (report.converged ? 1 : 0) << ','
      << format_double(report.seconds);
  return out.str();
}

}  // namespace lowercs
