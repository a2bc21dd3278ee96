#include "carpool/proposer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "carpool/errors.hpp"
#include "carpool/model.hpp"
#include "carpool/random.hpp"

namespace carpool {

std::string_view to_string(ProposerKind kind) {
  switch (kind) {
    case ProposerKind::kMock:
      return "mock";
    case ProposerKind::kStochastic:
      return "stochastic";
    case ProposerKind::kRemote:
      return "remote";
  }
  return "unknown";
}

MockProposer MockProposer::from_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("mock fixture directory not found: " + dir);
  std::vector<std::pair<unsigned long, fs::path>> numbered;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    const auto stem = entry.path().stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) continue;
    numbered.emplace_back(std::stoul(stem), entry.path());
  }
  std::sort(numbered.begin(), numbered.end());
  std::vector<std::string> fixtures;
  for (const auto& [num, path] : numbered) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    fixtures.push_back(buf.str());
  }
  if (fixtures.empty()) throw ConfigError("no numbered .txt fixtures in " + dir);
  return MockProposer(std::move(fixtures));
}

ProposerResponse MockProposer::propose(const ProposerRequest& request) {
  if (request.round_index == 0 || request.round_index > fixtures_.size()) {
    throw FixtureExhaustedError("mock proposer has " + std::to_string(fixtures_.size()) +
                                " fixtures, round " + std::to_string(request.round_index) + " requested");
  }
  return ProposerResponse{fixtures_[request.round_index - 1], {}, ProposerKind::kMock, 0};
}

double distance_scale(const DispatchInstance& inst) {
  std::vector<Point> all;
  all.insert(all.end(), inst.empty_vehicles.begin(), inst.empty_vehicles.end());
  all.insert(all.end(), inst.one_order_vehicles.begin(), inst.one_order_vehicles.end());
  all.insert(all.end(), inst.users.begin(), inst.users.end());
  if (all.size() < 2) return 1.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      total += manhattan(all[a], all[b]);
      ++pairs;
    }
  }
  const double mean = total / static_cast<double>(pairs);
  return mean > 0.0 ? mean : 1.0;
}

namespace {

constexpr std::size_t kNobody = std::numeric_limits<std::size_t>::max();
constexpr int kTabuRetries = 10;

struct Choice {
  VarKind kind;
  std::size_t vehicle;
  bool new_user_first = false;  // y only: the visiting user is picked up first
  double cost;
};

Construction construct_once(const DispatchInstance& inst, double temperature, double scale, Rng& rng) {
  std::vector<std::size_t> order(inst.p());
  for (std::size_t u = 0; u < order.size(); ++u) order[u] = u;
  if (temperature > 0.0) rng.shuffle(order);

  std::vector<std::size_t> solo(inst.m(), kNobody);  // x rider of each empty vehicle
  std::vector<bool> empty_full(inst.m(), false);
  std::vector<bool> one_used(inst.n(), false);
  Construction out;
  out.complete = true;
  std::vector<Choice> choices;
  std::vector<double> weights;

  for (std::size_t u : order) {
    const Point& user = inst.users[u];
    choices.clear();
    for (std::size_t i = 0; i < inst.m(); ++i) {
      if (!empty_full[i] && solo[i] == kNobody) {
        choices.push_back({VarKind::kX, i, false, manhattan(inst.empty_vehicles[i], user)});
      }
    }
    for (std::size_t i = 0; i < inst.m(); ++i) {
      if (empty_full[i] || solo[i] == kNobody) continue;
      const Point& rider = inst.users[solo[i]];
      const Point& car = inst.empty_vehicles[i];
      choices.push_back({VarKind::kY, i, false, manhattan(rider, user)});
      choices.push_back(
          {VarKind::kY, i, true, manhattan(car, user) + manhattan(user, rider) - manhattan(car, rider)});
    }
    for (std::size_t i = 0; i < inst.n(); ++i) {
      if (!one_used[i]) choices.push_back({VarKind::kZ, i, false, manhattan(inst.one_order_vehicles[i], user)});
    }
    if (choices.empty()) {
      out.complete = false;
      continue;
    }

    std::size_t pick = 0;
    for (std::size_t c = 1; c < choices.size(); ++c) {
      if (choices[c].cost < choices[pick].cost) pick = c;
    }
    if (temperature > 0.0) {
      const double min_cost = choices[pick].cost;
      const double denom = temperature * scale;
      weights.resize(choices.size());
      double total = 0.0;
      for (std::size_t c = 0; c < choices.size(); ++c) {
        weights[c] = std::exp(-(choices[c].cost - min_cost) / denom);
        total += weights[c];
      }
      double draw = rng.uniform() * total;
      pick = choices.size() - 1;
      for (std::size_t c = 0; c < choices.size(); ++c) {
        if (draw < weights[c]) {
          pick = c;
          break;
        }
        draw -= weights[c];
      }
    }

    const Choice& ch = choices[pick];
    switch (ch.kind) {
      case VarKind::kX:
        solo[ch.vehicle] = u;
        break;
      case VarKind::kY:
        empty_full[ch.vehicle] = true;
        break;
      case VarKind::kZ:
        one_used[ch.vehicle] = true;
        out.assignment.z.insert({ch.vehicle, u});
        break;
    }
    if (ch.kind == VarKind::kY) {
      const std::size_t rider = solo[ch.vehicle];
      solo[ch.vehicle] = kNobody;
      if (ch.new_user_first) out.assignment.y.insert({ch.vehicle, u, rider});
      else out.assignment.y.insert({ch.vehicle, rider, u});
    }
  }
  for (std::size_t i = 0; i < inst.m(); ++i) {
    if (solo[i] != kNobody) out.assignment.x.insert({i, solo[i]});
  }
  return out;
}

}  // namespace

Construction stochastic_construct(const DispatchInstance& inst, double temperature, std::uint64_t seed,
                                  const std::vector<Assignment>& tabu) {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be finite and non-negative");
  }
  Rng rng(seed);
  const double scale = distance_scale(inst);
  Construction result = construct_once(inst, temperature, scale, rng);
  if (temperature == 0.0) return result;  // deterministic: redrawing cannot help
  for (int retry = 0; retry < kTabuRetries; ++retry) {
    if (std::find(tabu.begin(), tabu.end(), result.assignment) == tabu.end()) break;
    result = construct_once(inst, temperature, scale, rng);
  }
  return result;
}

ProposerResponse StochasticProposer::propose(const ProposerRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Assignment> tabu;
  for (const auto& ex : request.prompt.exemplars) tabu.push_back(ex.solution);
  const auto built = stochastic_construct(request.prompt.instance, request.temperature,
                                          request.seed.value_or(0), tabu);
  char header[160];
  std::snprintf(header, sizeof header, "Sampled a dispatch plan at temperature %g%s.\n\n", request.temperature,
                built.complete ? "" : " (incomplete: not every user could be placed)");
  ProposerResponse resp;
  resp.text = header + format_solution_lines(built.assignment);
  resp.provider = ProposerKind::kStochastic;
  resp.latency = std::chrono::steady_clock::now() - start;
  return resp;
}

}  // namespace carpool
