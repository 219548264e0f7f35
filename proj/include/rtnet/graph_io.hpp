#pragma once

#include <filesystem>
#include <iosfwd>

#include "rtnet/events.hpp"
#include "rtnet/graph.hpp"

namespace rtnet {

/// Binary edge list, little-endian:
///   magic "RTNGRAPH" (8 bytes), u32 format version, u32 reserved (0),
///   u64 node count, u64 edge count,
///   node ids (u64 x node count), edges (u64 src, u64 dst, u64 weight).
/// Node ids are listed so isolated nodes survive a round trip.
inline constexpr std::uint32_t kGraphFormatVersion = 1;

void write_graph_binary(std::ostream& out, const WeightedDigraph& g);
/// Throws std::runtime_error on a bad header, version, or truncated body.
WeightedDigraph read_graph_binary(std::istream& in);

void save_graph(const std::filesystem::path& path, const WeightedDigraph& g);
WeightedDigraph load_graph(const std::filesystem::path& path);

/// CSV export (src, dst, weight). User names come from `users` when given.
void write_graph_csv(std::ostream& out, const WeightedDigraph& g, const UserTable* users = nullptr);

/// Compact event store used between pipeline stages. Same framing idea as the
/// graph file: magic "RTNEVENT", u32 version, u32 reserved, u64 user count,
/// length-prefixed user names, u64 event count, fixed-size event records.
void write_event_store(std::ostream& out, const EventStream& stream);
EventStream read_event_store(std::istream& in);
void save_event_store(const std::filesystem::path& path, const EventStream& stream);
EventStream load_event_store(const std::filesystem::path& path);

}  // namespace rtnet
