#include "rtnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rtnet/philox.hpp"

namespace rtnet {

namespace {

constexpr double kGrowthPeriod = 30.0 * kSecondsPerDay;

struct CategoryShare {
  RawCategory category;
  double share;
};

const std::vector<CategoryShare>& category_shares(ContentClass c) {
  static const std::array<std::vector<CategoryShare>, kNumClasses> kShares{{
      {{RawCategory::kScience, 0.3}, {RawCategory::kMainstreamMedia, 0.7}},
      {{RawCategory::kClickbait, 0.3},
       {RawCategory::kFakeOrHoax, 0.4},
       {RawCategory::kConspiracyJunkScience, 0.3}},
      {{RawCategory::kSatire, 0.05},
       {RawCategory::kPolitical, 0.2},
       {RawCategory::kOther, 0.3},
       {RawCategory::kShadow, 0.05},
       {RawCategory::kNA, 0.4}},
  }};
  return kShares[index_of(c)];
}

std::size_t pick_weighted(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

struct GroupState {
  UserId first_user = 0;
  std::vector<double> initial_followers;
  std::vector<bool> verified;
  std::vector<double> log_growth_at_step;  // cumulative log factor at each step start
};

double growth_rate_at(const SynthGroup& g, std::size_t step) {
  if (g.growth.empty()) return 0.0;
  return g.growth[std::min(step, g.growth.size() - 1)];
}

}  // namespace

void validate_synth_config(const SynthConfig& config) {
  if (config.range.empty()) throw std::invalid_argument("synthetic range is empty");
  if (config.growth_step <= 0) throw std::invalid_argument("growth_step must be positive");
  if (!(config.favourite_share >= 0.0 && config.favourite_share <= 1.0)) {
    throw std::invalid_argument("favourite_share must be in [0, 1]");
  }
  if (config.favourite_share > 0.0 && config.favourites_per_class == 0) {
    throw std::invalid_argument("favourites_per_class must be positive");
  }
  if (!(config.popularity_exponent >= 0.0)) {
    throw std::invalid_argument("popularity_exponent must be non-negative");
  }
  const std::uint64_t total =
      std::accumulate(config.events_per_class.begin(), config.events_per_class.end(),
                      std::uint64_t{0});
  if (total == 0) throw std::invalid_argument("synthetic config requests zero events");
  for (const auto& g : config.groups) {
    if (g.activity < 0.0 || g.creator_weight < 0.0) {
      throw std::invalid_argument("group '" + g.name + "' has a negative weight");
    }
    for (double m : g.class_mix) {
      if (m < 0.0) throw std::invalid_argument("group '" + g.name + "' has a negative mix");
    }
    if (g.bot_rate < 0.0 || g.bot_rate > 1.0 || g.verified_rate < 0.0 ||
        g.verified_rate > 1.0) {
      throw std::invalid_argument("group '" + g.name + "' has a rate outside [0,1]");
    }
    for (double r : g.growth) {
      if (r <= -1.0) throw std::invalid_argument("group '" + g.name + "' growth <= -100%");
    }
  }
  for (ContentClass c : kAllClasses) {
    if (config.events_per_class[index_of(c)] == 0) continue;
    double weight = 0.0;
    for (const auto& g : config.groups) {
      if (g.users > 0) weight += g.activity * g.class_mix[index_of(c)];
    }
    if (weight <= 0.0) {
      throw std::invalid_argument("no users can take part in " + std::string(to_string(c)) +
                                  " events");
    }
  }
}

EventStream generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  validate_synth_config(config);

  EventStream out;
  const std::size_t n_groups = config.groups.size();
  const auto span_seconds = config.range.end - config.range.start;
  const auto n_steps =
      static_cast<std::size_t>((span_seconds + config.growth_step - 1) / config.growth_step);

  // Users and their static attributes.
  RandomStream attr_rng(seed, {1, 0, 0});
  std::vector<GroupState> groups(n_groups);
  std::vector<std::vector<double>> popularity(n_groups);
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    const auto& g = config.groups[gi];
    auto& state = groups[gi];
    state.first_user = out.users.size();
    for (std::size_t u = 0; u < g.users; ++u) {
      out.users.intern(g.name + "-" + std::to_string(u));
      state.initial_followers.push_back(
          std::exp(g.follower_log_mean + g.follower_log_sd * attr_rng.normal()));
      state.verified.push_back(attr_rng.bernoulli(g.verified_rate));
    }
    state.log_growth_at_step.assign(n_steps + 1, 0.0);
    const double step_periods = static_cast<double>(config.growth_step) / kGrowthPeriod;
    for (std::size_t s = 0; s < n_steps; ++s) {
      state.log_growth_at_step[s + 1] =
          state.log_growth_at_step[s] + step_periods * std::log1p(growth_rate_at(g, s));
    }
    // Zipf-like popularity inside the group gives heavy-tailed edge weights.
    auto& cum = popularity[gi];
    double acc = 0.0;
    for (std::size_t u = 0; u < g.users; ++u) {
      acc += std::pow(static_cast<double>(u + 1), -config.popularity_exponent);
      cum.push_back(acc);
    }
  }

  // Per-class group choice, P(g | c) proportional to activity * mix.
  std::array<std::vector<double>, kNumClasses> group_cum;
  for (ContentClass c : kAllClasses) {
    double acc = 0.0;
    for (const auto& g : config.groups) {
      acc += g.users > 0 ? g.activity * g.class_mix[index_of(c)] : 0.0;
      group_cum[index_of(c)].push_back(acc);
    }
  }
  std::array<std::vector<double>, kNumClasses> category_cum;
  for (ContentClass c : kAllClasses) {
    double acc = 0.0;
    for (const auto& share : category_shares(c)) {
      acc += share.share;
      category_cum[index_of(c)].push_back(acc);
    }
  }

  // Favourite partners per (user, class), drawn like ordinary partners.
  struct Member {
    std::size_t group;
    std::size_t local;
  };
  const std::size_t n_fav = config.favourite_share > 0.0 ? config.favourites_per_class : 0;
  std::vector<Member> favourites(out.users.size() * kNumClasses * n_fav);
  RandomStream fav_rng(seed, {4, 0, 0});
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    for (std::size_t u = 0; u < config.groups[gi].users; ++u) {
      const UserId id = groups[gi].first_user + u;
      for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
        if (config.events_per_class[ci] == 0) continue;
        for (std::size_t f = 0; f < n_fav; ++f) {
          const std::size_t pg = pick_weighted(group_cum[ci], fav_rng.uniform());
          const std::size_t pu = pick_weighted(popularity[pg], fav_rng.uniform());
          favourites[(id * kNumClasses + ci) * n_fav + f] = {pg, pu};
        }
      }
    }
  }

  // Timeline: exact per-class volumes, uniformly placed in time.
  RandomStream time_rng(seed, {2, 0, 0});
  std::vector<std::pair<Timestamp, ContentClass>> slots;
  for (ContentClass c : kAllClasses) {
    for (std::uint64_t i = 0; i < config.events_per_class[index_of(c)]; ++i) {
      slots.emplace_back(config.range.start +
                             static_cast<Timestamp>(time_rng.below(
                                 static_cast<std::uint64_t>(span_seconds))),
                         c);
    }
  }
  // Shuffle classes before ordering by time so equal timestamps mix classes.
  for (std::size_t i = slots.size(); i > 1; --i) {
    std::swap(slots[i - 1].second, slots[time_rng.below(i)].second);
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  auto followers_at = [&](std::size_t gi, std::size_t local, Timestamp t) {
    const auto& g = config.groups[gi];
    const auto& state = groups[gi];
    const auto offset = t - config.range.start;
    const auto step = static_cast<std::size_t>(offset / config.growth_step);
    const double within =
        static_cast<double>(offset - static_cast<Timestamp>(step) * config.growth_step) /
        kGrowthPeriod;
    const double log_factor =
        state.log_growth_at_step[step] + within * std::log1p(growth_rate_at(g, step));
    return static_cast<std::uint64_t>(
        std::llround(state.initial_followers[local] * std::exp(log_factor)));
  };

  RandomStream event_rng(seed, {3, 0, 0});
  out.events.reserve(slots.size());
  for (const auto& [ts, cls] : slots) {
    const auto ci = index_of(cls);
    const std::size_t focal_group = pick_weighted(group_cum[ci], event_rng.uniform());
    const std::size_t focal = pick_weighted(popularity[focal_group], event_rng.uniform());
    std::size_t partner_group = 0;
    std::size_t partner = 0;
    if (n_fav > 0 && event_rng.uniform() < config.favourite_share) {
      const UserId id = groups[focal_group].first_user + focal;
      const auto& fav = favourites[(id * kNumClasses + ci) * n_fav + event_rng.below(n_fav)];
      partner_group = fav.group;
      partner = fav.local;
    } else {
      partner_group = pick_weighted(group_cum[ci], event_rng.uniform());
      partner = pick_weighted(popularity[partner_group], event_rng.uniform());
    }
    for (int attempt = 0; attempt < 8 && partner_group == focal_group && partner == focal;
         ++attempt) {
      partner = pick_weighted(popularity[partner_group], event_rng.uniform());
    }

    const double cw_focal = config.groups[focal_group].creator_weight;
    const double cw_partner = config.groups[partner_group].creator_weight;
    const double p_focal_creates =
        cw_focal + cw_partner > 0.0 ? cw_focal / (cw_focal + cw_partner) : 0.5;
    const bool focal_creates = event_rng.uniform() < p_focal_creates;

    const std::size_t creator_group = focal_creates ? focal_group : partner_group;
    const std::size_t creator = focal_creates ? focal : partner;
    const std::size_t consumer_group = focal_creates ? partner_group : focal_group;
    const std::size_t consumer = focal_creates ? partner : focal;

    RetweetEvent ev;
    ev.timestamp = ts;
    ev.retweetee = groups[creator_group].first_user + creator;
    ev.retweeter = groups[consumer_group].first_user + consumer;
    ev.raw_category = category_shares(cls)[pick_weighted(category_cum[ci], event_rng.uniform())]
                          .category;
    ev.content_class = cls;
    ev.retweetee_followers = followers_at(creator_group, creator, ts);
    ev.retweeter_followers = followers_at(consumer_group, consumer, ts);
    ev.retweetee_bot = event_rng.bernoulli(config.groups[creator_group].bot_rate);
    ev.retweeter_bot = event_rng.bernoulli(config.groups[consumer_group].bot_rate);
    ev.retweetee_verified = groups[creator_group].verified[creator];
    ev.retweeter_verified = groups[consumer_group].verified[consumer];
    out.events.push_back(ev);
  }
  return out;
}

SynthConfig default_synth_config(std::uint64_t total_events) {
  SynthConfig config;
  config.range = {1584403200, 1584403200 + 365 * kSecondsPerDay};  // 2020-03-17, one year

  const auto scaled = [&](double share) {
    return static_cast<std::uint64_t>(std::llround(share * static_cast<double>(total_events)));
  };
  config.events_per_class = {scaled(0.37), scaled(0.08), 0};
  config.events_per_class[2] = total_events - config.events_per_class[0] - config.events_per_class[1];

  const auto users_for = [&](double per_million, std::size_t floor) {
    return std::max<std::size_t>(
        floor, static_cast<std::size_t>(per_million * static_cast<double>(total_events) / 1e6));
  };

  SynthGroup factual{"fac", users_for(2000, 40), 0.37, {0.99, 0.0, 0.01}, 6.0, 9.0, 1.5,
                     {0.04, 0.05, 0.03, 0.02, 0.015, 0.01, 0.02, 0.03, 0.02, 0.01, 0.01, 0.015,
                      0.02, 0.01, 0.01, 0.008, 0.008, 0.01, 0.012, 0.01, 0.008, 0.006, 0.006,
                      0.005},
                     0.02, 0.3};
  SynthGroup misleading{"mis", users_for(800, 20), 0.08, {0.0, 0.99, 0.01}, 6.0, 7.5, 1.5,
                        {0.02, 0.03, 0.04, 0.03, 0.025, 0.02, 0.01, 0.005, 0.01, 0.02, 0.03,
                         0.035, 0.03, 0.025, 0.02, 0.02, 0.018, 0.015, 0.012, 0.01, 0.012,
                         0.015, 0.012, 0.01},
                        0.10, 0.02};
  SynthGroup uncertain{"unc", users_for(4000, 60), 0.55, {0.005, 0.005, 0.99}, 6.0, 8.0, 1.5,
                       {0.01, 0.012, 0.01, 0.008, 0.009, 0.01, 0.008, 0.007, 0.008, 0.01,
                        0.009, 0.008},
                       0.05, 0.1};
  SynthGroup swayable{"sw", users_for(60000, 400), 1.0, {0.4, 0.2, 0.4}, 1.0, 6.0, 1.8,
                      {}, 0.12, 0.01};
  config.groups = {factual, misleading, uncertain, swayable};
  return config;
}

}  // namespace rtnet
