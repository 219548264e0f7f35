#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "rtnet/events.hpp"
#include "rtnet/graph.hpp"
#include "rtnet/sir.hpp"

namespace rtnet::testing {

inline RetweetEvent event(Timestamp ts, UserId creator, UserId consumer,
                          ContentClass cls = ContentClass::kFactual) {
  RetweetEvent e;
  e.timestamp = ts;
  e.retweetee = creator;
  e.retweeter = consumer;
  e.content_class = cls;
  e.raw_category = cls == ContentClass::kFactual      ? RawCategory::kScience
                   : cls == ContentClass::kMisleading ? RawCategory::kFakeOrHoax
                                                      : RawCategory::kPolitical;
  return e;
}

inline WeightedDigraph graph(std::initializer_list<Edge> edges,
                             std::vector<UserId> extra_nodes = {}) {
  return WeightedDigraph::from_edges(std::vector<Edge>(edges), extra_nodes);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(RTNET_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Cascade setup with users 0..n_aligned-1 aligned and the next n_swayable
/// users swayable, follower counts as given.
inline CascadeSetup cascade_setup(std::vector<double> aligned_followers,
                                  std::vector<double> swayable_followers,
                                  ContentClass cls = ContentClass::kFactual,
                                  std::uint32_t key = 0) {
  CascadeSetup s;
  s.window_key = key;
  s.content_class = cls;
  for (std::size_t i = 0; i < aligned_followers.size(); ++i) s.aligned.push_back(i);
  for (std::size_t i = 0; i < swayable_followers.size(); ++i) {
    s.swayable.push_back(aligned_followers.size() + i);
  }
  s.aligned_followers = std::move(aligned_followers);
  s.swayable_followers = std::move(swayable_followers);
  return s;
}

}  // namespace rtnet::testing
