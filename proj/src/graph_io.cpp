#include "rtnet/graph_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "rtnet/csv.hpp"

namespace rtnet {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

constexpr std::array<char, 8> kGraphMagic{'R', 'T', 'N', 'G', 'R', 'A', 'P', 'H'};
constexpr std::array<char, 8> kEventMagic{'R', 'T', 'N', 'E', 'V', 'E', 'N', 'T'};
constexpr std::uint32_t kEventFormatVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw std::runtime_error("truncated binary file");
  }
  return value;
}

void check_header(std::istream& in, const std::array<char, 8>& magic, std::uint32_t version,
                  const char* what) {
  std::array<char, 8> buf{};
  if (!in.read(buf.data(), buf.size()) || buf != magic) {
    throw std::runtime_error(std::string("not a ") + what + " file");
  }
  const auto v = get<std::uint32_t>(in);
  if (v != version) {
    throw std::runtime_error(std::string("unsupported ") + what + " format version " +
                             std::to_string(v));
  }
  get<std::uint32_t>(in);
}

}  // namespace

void write_graph_binary(std::ostream& out, const WeightedDigraph& g) {
  out.write(kGraphMagic.data(), kGraphMagic.size());
  put<std::uint32_t>(out, kGraphFormatVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, g.node_count());
  put<std::uint64_t>(out, g.edge_count());
  for (UserId id : g.nodes()) put<std::uint64_t>(out, id);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge edge = g.edge(e);
    put<std::uint64_t>(out, edge.source);
    put<std::uint64_t>(out, edge.sink);
    put<std::uint64_t>(out, edge.weight);
  }
}

WeightedDigraph read_graph_binary(std::istream& in) {
  check_header(in, kGraphMagic, kGraphFormatVersion, "graph");
  const auto n_nodes = get<std::uint64_t>(in);
  const auto n_edges = get<std::uint64_t>(in);
  std::vector<UserId> nodes(n_nodes);
  for (auto& id : nodes) id = get<std::uint64_t>(in);
  std::vector<Edge> edges(n_edges);
  for (auto& e : edges) {
    e.source = get<std::uint64_t>(in);
    e.sink = get<std::uint64_t>(in);
    e.weight = get<std::uint64_t>(in);
  }
  auto g = WeightedDigraph::from_edges(std::move(edges), nodes);
  if (g.node_count() != n_nodes || g.edge_count() != n_edges) {
    throw std::runtime_error("graph file header does not match its body");
  }
  return g;
}

void save_graph(const std::filesystem::path& path, const WeightedDigraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_graph_binary(out, g);
}

WeightedDigraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_graph_binary(in);
}

void write_graph_csv(std::ostream& out, const WeightedDigraph& g, const UserTable* users) {
  CsvWriter csv(out);
  csv.header({"src", "dst", "weight"});
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge edge = g.edge(e);
    if (users) {
      csv.field(users->name(edge.source)).field(users->name(edge.sink));
    } else {
      csv.field(edge.source).field(edge.sink);
    }
    csv.field(edge.weight).end_row();
  }
}

void write_event_store(std::ostream& out, const EventStream& stream) {
  out.write(kEventMagic.data(), kEventMagic.size());
  put<std::uint32_t>(out, kEventFormatVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, stream.users.size());
  for (const auto& name : stream.users.names()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  put<std::uint64_t>(out, stream.events.size());
  for (const auto& e : stream.events) {
    put<std::int64_t>(out, e.timestamp);
    put<std::uint64_t>(out, e.retweetee);
    put<std::uint64_t>(out, e.retweeter);
    put<std::uint64_t>(out, e.retweetee_followers);
    put<std::uint64_t>(out, e.retweeter_followers);
    const std::uint8_t flags = static_cast<std::uint8_t>(
        (e.retweetee_bot ? 1 : 0) | (e.retweeter_bot ? 2 : 0) | (e.retweetee_verified ? 4 : 0) |
        (e.retweeter_verified ? 8 : 0));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.raw_category));
    put<std::uint8_t>(out, flags);
  }
}

EventStream read_event_store(std::istream& in) {
  check_header(in, kEventMagic, kEventFormatVersion, "event store");
  EventStream stream;
  const auto n_users = get<std::uint64_t>(in);
  std::string name;
  for (std::uint64_t i = 0; i < n_users; ++i) {
    const auto len = get<std::uint32_t>(in);
    name.resize(len);
    if (!in.read(name.data(), len)) throw std::runtime_error("truncated binary file");
    if (stream.users.intern(name) != i) throw std::runtime_error("duplicate user in event store");
  }
  const auto n_events = get<std::uint64_t>(in);
  stream.events.resize(n_events);
  for (auto& e : stream.events) {
    e.timestamp = get<std::int64_t>(in);
    e.retweetee = get<std::uint64_t>(in);
    e.retweeter = get<std::uint64_t>(in);
    e.retweetee_followers = get<std::uint64_t>(in);
    e.retweeter_followers = get<std::uint64_t>(in);
    const auto cat = get<std::uint8_t>(in);
    const auto flags = get<std::uint8_t>(in);
    if (cat >= kNumCategories || e.retweetee >= n_users || e.retweeter >= n_users) {
      throw std::runtime_error("corrupt event record");
    }
    e.raw_category = static_cast<RawCategory>(cat);
    e.content_class = classify_category(e.raw_category);
    e.retweetee_bot = flags & 1;
    e.retweeter_bot = flags & 2;
    e.retweetee_verified = flags & 4;
    e.retweeter_verified = flags & 8;
  }
  return stream;
}

void save_event_store(const std::filesystem::path& path, const EventStream& stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_event_store(out, stream);
}

EventStream load_event_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_event_store(in);
}

}  // namespace rtnet
