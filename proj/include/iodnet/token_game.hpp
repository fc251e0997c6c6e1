#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iodnet/hcpn.hpp"

namespace iodnet {

/// untimed: timestamps, delays and clock windows are ignored (every
/// delayed transition is eventually firable). discrete: integer clock with
/// maximal-progress semantics.
enum class TimeMode { untimed, discrete };

std::string_view to_string(TimeMode m);

/// Arc inscriptions are constant colors, so a transition has at most one
/// variable binding per marking; the only free choice is the delay drawn
/// for a timed transition.
struct Binding {
  std::optional<Time> delay;

  std::string to_string() const;
  bool operator==(const Binding&) const = default;
};

struct Enabling {
  std::size_t transition = 0;
  Binding binding;

  bool operator==(const Enabling&) const = default;
};

/// Throws Error("ill-typed-marking") when `m` does not fit `net`.
void check_marking(const FlatNet& net, const Marking& m);

/// Transitions enabled at `m`. In discrete mode consumed tokens must carry
/// timestamps <= clock and the clock must lie in the guard window; the
/// returned binding leaves the delay unchosen.
std::vector<Enabling> enabled(const FlatNet& net, const Marking& m, TimeMode mode = TimeMode::untimed);

bool is_enabled(const FlatNet& net, const Marking& m, std::size_t transition, TimeMode mode = TimeMode::untimed);

/// Fires one transition. In discrete mode a delayed transition needs
/// `binding.delay` inside its delay interval; timed output tokens are
/// stamped clock + delay. Throws Error("not-enabled") or Error("bad-binding").
Marking fire(const FlatNet& net, const Marking& m, std::size_t transition, const Binding& binding,
             TimeMode mode = TimeMode::untimed);

/// Earliest clock value > m.clock at which some transition becomes enabled.
std::optional<Time> next_enabling_time(const FlatNet& net, const Marking& m);

/// Moves the clock to the next enabling time. Throws Error("not-timed") for
/// nets without timed places and Error("time-deadlock") when no transition
/// can ever become enabled.
Marking advance_time(const FlatNet& net, const Marking& m);

/// Seeded randomness for one simulation run; never shared between runs.
class SimulationContext {
public:
  explicit SimulationContext(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  Time uniform(Time lo, Time hi);
  std::size_t pick(std::size_t n);

private:
  std::mt19937_64 engine_;
};

/// Fires `transition`, drawing its delay from `ctx` when it has one.
Marking fire(const FlatNet& net, const Marking& m, std::size_t transition, SimulationContext& ctx,
             Binding* chosen = nullptr, TimeMode mode = TimeMode::discrete);

/// Final marking: at least one token, and every token on a terminal place.
bool is_final_marking(const FlatNet& net, const Marking& m);

struct SimulationOptions {
  std::uint64_t seed = 0;
  std::size_t steps = 100;
  TimeMode mode = TimeMode::discrete;
};

struct SimulationStep {
  Time clock = 0; // clock at which the transition fired
  std::size_t transition = 0;
  Binding binding;
  std::vector<std::pair<std::size_t, Token>> consumed;
  std::vector<std::pair<std::size_t, Token>> produced;
};

enum class Termination { step_limit, proper, deadlock, time_deadlock };

std::string_view to_string(Termination t);

struct SimulationLog {
  std::vector<SimulationStep> steps;
  Termination termination = Termination::step_limit;
  Marking final_marking;
};

SimulationLog simulate(const FlatNet& net, const SimulationOptions& options);

/// `clock | transition | binding | marking-delta` per step, then a
/// `# terminated:` trailer line.
std::string format_log(const FlatNet& net, const SimulationLog& log);

} // namespace iodnet
