#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/graph.hpp"

namespace qwalk {

struct EdgeListOptions {
  std::string comment_prefix = "#";
  // '\0' accepts any mix of whitespace and commas.
  char delimiter = '\0';
  bool one_indexed = false;
  std::optional<std::size_t> node_count;
};

// Dense id -> original id. Sorted ascending, so lookups are binary searches.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::int64_t> originals) : originals_(std::move(originals)) {
    std::sort(originals_.begin(), originals_.end());
    originals_.erase(std::unique(originals_.begin(), originals_.end()), originals_.end());
  }

  std::size_t size() const { return originals_.size(); }
  std::int64_t original(NodeId dense) const { return originals_.at(dense); }
  std::optional<NodeId> dense(std::int64_t original) const {
    auto it = std::lower_bound(originals_.begin(), originals_.end(), original);
    if (it == originals_.end() || *it != original) return std::nullopt;
    return static_cast<NodeId>(it - originals_.begin());
  }
  const std::vector<std::int64_t>& originals() const { return originals_; }

  void write(std::ostream& out) const {
    for (auto id : originals_) out << id << '\n';
  }
  static IdMap read(std::istream& in) {
    std::vector<std::int64_t> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
      if (ec != std::errc()) throw ParseError(line_no, "expected an integer id, got '" + line + "'");
      ids.push_back(v);
    }
    return IdMap(std::move(ids));
  }

 private:
  std::vector<std::int64_t> originals_;
};

namespace detail {

inline bool is_separator(char c, char delimiter) {
  if (delimiter != '\0') return c == delimiter || c == '\r' || c == ' ' || c == '\t';
  return c == ' ' || c == '\t' || c == ',' || c == '\r';
}

inline std::vector<std::string_view> tokenize(std::string_view line, char delimiter) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_separator(line[i], delimiter)) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j], delimiter)) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline std::int64_t parse_id(std::string_view token, std::size_t line_no) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || p != token.data() + token.size()) {
    throw ParseError(line_no, "expected an integer node id, got '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace detail

// Raw (original-id) pairs, one per data line; columns past the second are ignored.
inline std::vector<std::pair<std::int64_t, std::int64_t>> read_raw_pairs(std::istream& in,
                                                                          const EdgeListOptions& opt) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    view.remove_prefix(first);
    if (!opt.comment_prefix.empty() && view.starts_with(opt.comment_prefix)) continue;
    auto tokens = detail::tokenize(view, opt.delimiter);
    if (tokens.size() < 2) throw ParseError(line_no, "expected two node ids");
    std::int64_t a = detail::parse_id(tokens[0], line_no);
    std::int64_t b = detail::parse_id(tokens[1], line_no);
    if (opt.one_indexed) {
      --a;
      --b;
    }
    if (a < 0 || b < 0) throw ParseError(line_no, "negative node id");
    pairs.emplace_back(a, b);
  }
  return pairs;
}

// Pairs in dense id space; with an id map, unknown ids are errors.
inline std::vector<NodePair> read_pairs(std::istream& in, const EdgeListOptions& opt,
                                        const IdMap* ids = nullptr) {
  auto raw = read_raw_pairs(in, opt);
  std::vector<NodePair> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [a, b] = raw[i];
    if (ids) {
      auto da = ids->dense(a), db = ids->dense(b);
      if (!da || !db) throw Error("pair #" + std::to_string(i + 1) + " references an id missing from the id map");
      out.push_back({*da, *db});
    } else {
      if (a > UINT32_MAX - 1 || b > UINT32_MAX - 1) throw Error("node id exceeds 32-bit range");
      out.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
    }
  }
  return out;
}

inline Graph load_edge_list(std::istream& in, const EdgeListOptions& opt = {}) {
  auto pairs = read_pairs(in, opt);
  std::size_t n = 0;
  for (const auto& p : pairs) n = std::max<std::size_t>(n, std::max(p.u, p.v) + std::size_t{1});
  if (opt.node_count) {
    if (*opt.node_count < n) {
      throw Error("edge list references node " + std::to_string(n - 1) + " but node_count is " +
                  std::to_string(*opt.node_count));
    }
    n = *opt.node_count;
  }
  if (n == 0) throw Error("empty graph: no edges found");
  return Graph::from_edges(n, pairs);
}

struct RelabeledGraph {
  Graph graph;
  IdMap ids;
};

// Maps the distinct ids that occur onto 0..n-1 in ascending order.
inline RelabeledGraph load_edge_list_relabeled(std::istream& in, const EdgeListOptions& opt = {}) {
  auto raw = read_raw_pairs(in, opt);
  std::vector<std::int64_t> seen;
  seen.reserve(raw.size() * 2);
  for (auto [a, b] : raw) {
    seen.push_back(a);
    seen.push_back(b);
  }
  IdMap ids(std::move(seen));
  if (ids.size() == 0) throw Error("empty graph: no edges found");
  std::vector<NodePair> pairs;
  pairs.reserve(raw.size());
  for (auto [a, b] : raw) pairs.push_back({*ids.dense(a), *ids.dense(b)});
  return {Graph::from_edges(ids.size(), pairs), std::move(ids)};
}

inline Graph load_edge_list_file(const std::string& path, const EdgeListOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return load_edge_list(in, opt);
}

inline std::vector<NodePair> read_pairs_file(const std::string& path, const EdgeListOptions& opt = {},
                                             const IdMap* ids = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pair file '" + path + "'");
  return read_pairs(in, opt, ids);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

// Binary container, all integers little-endian:
//   bytes 0..7   magic "QWLKCSR\0"
//   bytes 8..11  u32 format version (1)
//   bytes 12..15 u32 reserved (0)
//   u64 node_count N, u64 entry_count M (= 2 * undirected edges)
//   (N+1) x u64 row offsets, M x u32 neighbor ids
inline constexpr std::array<char, 8> kGraphMagic = {'Q', 'W', 'L', 'K', 'C', 'S', 'R', '\0'};
inline constexpr std::uint32_t kGraphFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError("truncated graph container");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace detail

inline void write_graph_binary(std::ostream& out, const Graph& g) {
  out.write(kGraphMagic.data(), kGraphMagic.size());
  detail::put_le<std::uint32_t>(out, kGraphFormatVersion);
  detail::put_le<std::uint32_t>(out, 0);
  detail::put_le<std::uint64_t>(out, g.node_count());
  detail::put_le<std::uint64_t>(out, g.entry_count());
  for (auto o : g.offsets()) detail::put_le<std::uint64_t>(out, o);
  for (auto v : g.neighbor_array()) detail::put_le<std::uint32_t>(out, v);
}

inline Graph read_graph_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kGraphMagic) {
    throw FormatError("not a qwalk graph container (bad magic)");
  }
  auto version = detail::get_le<std::uint32_t>(in);
  if (version != kGraphFormatVersion) {
    throw FormatError("unsupported graph container version " + std::to_string(version));
  }
  detail::get_le<std::uint32_t>(in);
  auto n = detail::get_le<std::uint64_t>(in);
  auto m = detail::get_le<std::uint64_t>(in);
  if (n >= UINT32_MAX) throw FormatError("node count too large");
  std::vector<std::uint64_t> offsets(n + 1);
  for (auto& o : offsets) o = detail::get_le<std::uint64_t>(in);
  std::vector<NodeId> neighbors(m);
  for (auto& v : neighbors) v = detail::get_le<std::uint32_t>(in);
  return Graph::from_csr(std::move(offsets), std::move(neighbors));
}

}  // namespace qwalk
