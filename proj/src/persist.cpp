#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "gsmat/error.hpp"
#include "gsmat/storage.hpp"

namespace gsmat {

namespace {

constexpr std::string_view kMagic = "GSMAT";
constexpr std::string_view kVersion = "1";

void write_pairs(const std::filesystem::path& file, std::span<const NodeId> values) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError(StoreErrorKind::io, "cannot write " + file.string());
  std::vector<char> buf;
  buf.reserve(values.size() * 8);
  for (NodeId v : values) {
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw StoreError(StoreErrorKind::io, "write failed: " + file.string());
}

std::vector<NodeId> read_pairs(const std::filesystem::path& file, std::uint64_t expected_pairs) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw StoreError(StoreErrorKind::truncated, "missing " + file.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() != expected_pairs * 16) {
    throw StoreError(StoreErrorKind::truncated, file.string() + ": expected " + std::to_string(expected_pairs * 16) +
                                                    " bytes, found " + std::to_string(buf.size()));
  }
  std::vector<NodeId> values(expected_pairs * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    NodeId v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<NodeId>(static_cast<unsigned char>(buf[i * 8 + b])) << (8 * b);
    values[i] = v;
  }
  return values;
}

std::uint64_t parse_count(std::string_view text, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw StoreError(StoreErrorKind::corrupt, "bad " + what + ": '" + std::string(text) + "'");
  }
  return v;
}

std::string pair_file(PredId pid, Orientation o) {
  return "p" + std::to_string(pid) + (o == Orientation::so ? ".so" : ".os");
}

}  // namespace

void Store::persist(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StoreError(StoreErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  {
    std::ofstream meta(dir / "meta", std::ios::binary | std::ios::trunc);
    if (!meta) throw StoreError(StoreErrorKind::io, "cannot write " + (dir / "meta").string());
    meta << kMagic << kVersion << '\n'
         << triple_count_ << '\n'
         << dict_.predicate_count() << '\n'
         << dict_.node_count() << '\n';
  }
  dict_.save(dir);

  std::ofstream stats(dir / "stats.tsv", std::ios::binary | std::ios::trunc);
  if (!stats) throw StoreError(StoreErrorKind::io, "cannot write " + (dir / "stats.tsv").string());
  for (const auto& row : stats_.rows()) {
    stats << row.pid << '\t' << row.cardinality << '\t' << row.distinct_subjects << '\t' << row.distinct_objects
          << '\n';
    const auto& m = matrix_for(row.pid);
    write_pairs(dir / pair_file(row.pid, Orientation::so), m.so_pairs());
    write_pairs(dir / pair_file(row.pid, Orientation::os), m.os_pairs());
  }
}

Store Store::load(const std::filesystem::path& dir) {
  std::ifstream meta(dir / "meta", std::ios::binary);
  if (!meta) throw StoreError(StoreErrorKind::io, "not a store (missing meta): " + dir.string());
  std::array<std::string, 4> lines;
  for (auto& l : lines) {
    if (!std::getline(meta, l)) throw StoreError(StoreErrorKind::truncated, "meta: too few lines");
  }
  const std::string_view magic = lines[0];
  if (!magic.starts_with(kMagic)) throw StoreError(StoreErrorKind::bad_magic, "meta: bad magic '" + lines[0] + "'");
  if (magic.substr(kMagic.size()) != kVersion) {
    throw StoreError(StoreErrorKind::version_mismatch, "meta: unsupported store version '" +
                                                           std::string(magic.substr(kMagic.size())) + "'");
  }
  const auto triples = parse_count(lines[1], "triple count");
  const auto preds = parse_count(lines[2], "predicate count");
  const auto nodes = parse_count(lines[3], "node count");

  TermDictionary dict = TermDictionary::load(dir);
  if (dict.predicate_count() != preds || dict.node_count() != nodes) {
    throw StoreError(StoreErrorKind::truncated, "dictionary sizes disagree with meta");
  }

  std::ifstream stats(dir / "stats.tsv", std::ios::binary);
  if (!stats) throw StoreError(StoreErrorKind::io, "cannot read " + (dir / "stats.tsv").string());
  std::vector<std::vector<NodeId>> so_by_pid(preds);
  std::vector<PredicateStat> expected;
  std::string line;
  while (std::getline(stats, line)) {
    std::array<std::uint64_t, 4> f{};
    std::size_t start = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t tab = k < 3 ? line.find('\t', start) : line.size();
      if (tab == std::string::npos) throw StoreError(StoreErrorKind::corrupt, "stats.tsv: short line '" + line + "'");
      f[k] = parse_count(std::string_view(line).substr(start, tab - start), "stats field");
      start = tab + 1;
    }
    const PredId pid = f[0];
    if (pid == kNoPred || pid > preds) throw StoreError(StoreErrorKind::corrupt, "stats.tsv: unknown pid " + line);
    so_by_pid[pid - 1] = read_pairs(dir / pair_file(pid, Orientation::so), f[1]);
    expected.push_back({pid, f[1], f[2], f[3]});
  }

  std::vector<PredicateMatrix> matrices;
  matrices.reserve(preds);
  for (PredId pid = 1; pid <= preds; ++pid) {
    try {
      matrices.emplace_back(pid, std::move(so_by_pid[pid - 1]));
    } catch (const ContractViolation& e) {
      throw StoreError(StoreErrorKind::corrupt, pair_file(pid, Orientation::so) + ": " + e.what());
    }
  }
  for (const auto& row : expected) {
    const auto os = read_pairs(dir / pair_file(row.pid, Orientation::os), row.cardinality);
    const auto built = matrices[row.pid - 1].os_pairs();
    if (!std::equal(os.begin(), os.end(), built.begin(), built.end())) {
      throw StoreError(StoreErrorKind::corrupt, pair_file(row.pid, Orientation::os) + ": disagrees with .so");
    }
  }

  Store store(std::move(dict), std::move(matrices));
  if (store.triple_count() != triples) throw StoreError(StoreErrorKind::corrupt, "meta: triple count mismatch");
  if (store.stats().rows() != expected) throw StoreError(StoreErrorKind::corrupt, "stats.tsv disagrees with data");
  return store;
}

}  // namespace gsmat
