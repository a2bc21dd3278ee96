#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carpool/assignment.hpp"
#include "carpool/prompt.hpp"

namespace carpool {

struct ProposerRequest {
  PromptBundle prompt;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  std::size_t round_index = 1;  // 1-based
};

enum class ProposerKind { kMock, kStochastic, kRemote };

std::string_view to_string(ProposerKind kind);

struct ProposerResponse {
  std::string text;
  std::chrono::nanoseconds latency{0};
  ProposerKind provider = ProposerKind::kMock;
  int retry_count = 0;
};

/// Produces candidate solution text for a prompt at a temperature.
/// Implementations other than the remote client are deterministic in
/// (seed, temperature, prompt) and safe to call concurrently.
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual ProposerResponse propose(const ProposerRequest& request) = 0;
  virtual ProposerKind kind() const noexcept = 0;
};

/// Replays scripted texts: round r returns fixture r.
class MockProposer final : public Proposer {
 public:
  explicit MockProposer(std::vector<std::string> fixtures) : fixtures_(std::move(fixtures)) {}

  /// Loads every `<number>.txt` in `dir`, ordered by number.
  static MockProposer from_directory(const std::string& dir);

  ProposerResponse propose(const ProposerRequest& request) override;
  ProposerKind kind() const noexcept override { return ProposerKind::kMock; }
  std::size_t size() const noexcept { return fixtures_.size(); }

 private:
  std::vector<std::string> fixtures_;
};

struct Construction {
  Assignment assignment;
  bool complete = false;  // false: some user had no remaining option
};

/// Mean Manhattan distance over all unordered pairs of entities; 1 when
/// there are fewer than two entities or all coincide.
double distance_scale(const DispatchInstance& inst);

/// Randomised greedy construction.
///
/// Users are visited in a seeded random order (index order when T = 0).
/// Each user picks among its remaining options: a free empty vehicle (x),
/// joining a vehicle that already carries one x rider in either pickup
/// order (turning it into y), or a free one-order vehicle (z). Option o is
/// drawn with probability proportional to exp(-c_o / (T * scale)), with c_o
/// its marginal cost and scale = distance_scale(inst). T = 0 takes the
/// cheapest option, first in x, y, z enumeration order on ties. A result
/// equal to one of `tabu` is redrawn up to 10 times before it is accepted.
Construction stochastic_construct(const DispatchInstance& inst, double temperature, std::uint64_t seed,
                                  const std::vector<Assignment>& tabu = {});

/// Offline reference proposer built on stochastic_construct. Prompt
/// exemplars are treated as tabu.
class StochasticProposer final : public Proposer {
 public:
  ProposerResponse propose(const ProposerRequest& request) override;
  ProposerKind kind() const noexcept override { return ProposerKind::kStochastic; }
};

}  // namespace carpool
