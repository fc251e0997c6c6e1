#include "iodnet/token_game.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace iodnet {

std::string_view to_string(TimeMode m) { return m == TimeMode::untimed ? "untimed" : "discrete"; }

std::string_view to_string(Termination t) {
  switch (t) {
  case Termination::step_limit: return "step-limit";
  case Termination::proper: return "proper";
  case Termination::deadlock: return "deadlock";
  case Termination::time_deadlock: return "time-deadlock";
  }
  return "?";
}

std::string Binding::to_string() const { return delay ? "delay=" + std::to_string(*delay) : "-"; }

void check_marking(const FlatNet& net, const Marking& m) {
  if (m.tokens.size() != net.places.size())
    throw Error("ill-typed-marking", "marking covers " + std::to_string(m.tokens.size()) + " places, net has " +
                                         std::to_string(net.places.size()));
  for (std::size_t p = 0; p < m.tokens.size(); ++p) {
    const auto& place = net.places[p];
    const auto* cs = net.find_color_set(place.color_set);
    for (const auto& t : m.tokens[p]) {
      if (!cs || !cs->contains(t.color))
        throw Error("ill-typed-marking", "token '" + t.color + "' outside color set of " + place.id);
      if (t.timestamp.has_value() != place.timed)
        throw Error("ill-typed-marking", "timestamp presence does not match place " + place.id);
    }
  }
}

namespace {

// Tokens an enabling consumes: per (place, color) the `weight` earliest ones.
struct Demand {
  std::size_t place;
  std::string color;
  std::uint32_t count;
};

std::vector<Demand> demands(const FlatTransition& t) {
  std::map<std::pair<std::size_t, std::string>, std::uint32_t> need;
  for (const auto& a : t.inputs) need[{a.place, a.color}] += a.weight;
  std::vector<Demand> out;
  for (const auto& [key, n] : need) out.push_back({key.first, key.second, n});
  return out;
}

// Latest timestamp among the tokens a demand would take, or nullopt when
// the place holds too few tokens of that color.
std::optional<Time> readiness(const Marking& m, const Demand& d) {
  const auto& bag = m.tokens[d.place];
  auto it = std::lower_bound(bag.begin(), bag.end(), Token{d.color, std::nullopt});
  Time latest = std::numeric_limits<Time>::min();
  std::uint32_t got = 0;
  for (; it != bag.end() && it->color == d.color && got < d.count; ++it, ++got)
    if (it->timestamp) latest = std::max(latest, *it->timestamp);
  if (got < d.count) return std::nullopt;
  return latest;
}

// Earliest clock value >= from at which `t` is enabled, ignoring other transitions.
std::optional<Time> earliest(const FlatTransition& t, const Marking& m, Time from) {
  if (t.guard.unsatisfiable()) return std::nullopt;
  Time at = from;
  for (const auto& d : demands(t)) {
    auto r = readiness(m, d);
    if (!r) return std::nullopt;
    at = std::max(at, *r);
  }
  if (t.guard.clock_window) {
    at = std::max(at, t.guard.clock_window->lo);
    if (at > t.guard.clock_window->hi) return std::nullopt;
  }
  return at;
}

bool structurally_enabled(const FlatTransition& t, const Marking& m) {
  if (t.guard.unsatisfiable()) return false;
  for (const auto& d : demands(t))
    if (!readiness(m, d)) return false;
  return true;
}

struct Delta {
  std::vector<std::pair<std::size_t, Token>> consumed;
  std::vector<std::pair<std::size_t, Token>> produced;
};

Marking fire_impl(const FlatNet& net, const Marking& m, std::size_t ti, const Binding& b, TimeMode mode,
                  Delta* delta) {
  if (ti >= net.transitions.size()) throw Error("not-enabled", "no transition with index " + std::to_string(ti));
  const auto& t = net.transitions[ti];
  if (!is_enabled(net, m, ti, mode)) throw Error("not-enabled", t.id + " is not enabled");
  Time delay = 0;
  if (mode == TimeMode::discrete) {
    if (t.delay) {
      if (!b.delay || !t.delay->contains(*b.delay))
        throw Error("bad-binding", t.id + " needs a delay in [" + std::to_string(t.delay->lo) + "," +
                                       std::to_string(t.delay->hi) + "]");
      delay = *b.delay;
    } else if (b.delay && *b.delay != 0) {
      throw Error("bad-binding", t.id + " has no delay");
    }
  }
  Marking next = m;
  for (const auto& d : demands(t)) {
    auto& bag = next.tokens[d.place];
    auto it = std::lower_bound(bag.begin(), bag.end(), Token{d.color, std::nullopt});
    if (delta)
      for (auto k = it; k != it + d.count; ++k) delta->consumed.emplace_back(d.place, *k);
    bag.erase(it, it + d.count);
  }
  for (const auto& a : t.outputs) {
    const bool timed = net.places[a.place].timed;
    for (std::uint32_t k = 0; k < a.weight; ++k) {
      Token tok{a.color, timed ? std::optional<Time>(mode == TimeMode::discrete ? m.clock + delay : 0) : std::nullopt};
      if (delta) delta->produced.emplace_back(a.place, tok);
      next.add(a.place, std::move(tok));
    }
  }
  return next;
}

} // namespace

bool is_enabled(const FlatNet& net, const Marking& m, std::size_t ti, TimeMode mode) {
  const auto& t = net.transitions.at(ti);
  if (mode == TimeMode::untimed) return structurally_enabled(t, m);
  auto at = earliest(t, m, m.clock);
  return at && *at == m.clock;
}

std::vector<Enabling> enabled(const FlatNet& net, const Marking& m, TimeMode mode) {
  std::vector<Enabling> out;
  for (std::size_t i = 0; i < net.transitions.size(); ++i)
    if (is_enabled(net, m, i, mode)) out.push_back({i, {}});
  return out;
}

Marking fire(const FlatNet& net, const Marking& m, std::size_t transition, const Binding& binding, TimeMode mode) {
  return fire_impl(net, m, transition, binding, mode, nullptr);
}

std::optional<Time> next_enabling_time(const FlatNet& net, const Marking& m) {
  std::optional<Time> best;
  for (const auto& t : net.transitions) {
    auto at = earliest(t, m, m.clock + 1);
    if (at && (!best || *at < *best)) best = at;
  }
  return best;
}

Marking advance_time(const FlatNet& net, const Marking& m) {
  if (!net.has_timed_places()) throw Error("not-timed", "the net has no timed places");
  auto at = next_enabling_time(net, m);
  if (!at) throw Error("time-deadlock", "no transition can become enabled at a later time");
  Marking next = m;
  next.clock = *at;
  return next;
}

Time SimulationContext::uniform(Time lo, Time hi) {
  if (lo > hi) throw Error("bad-range", "empty range");
  const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<Time>(engine_());
  // Rejection keeps the draw unbiased and independent of the library's distributions.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v;
  do v = engine_();
  while (v >= limit);
  return lo + static_cast<Time>(v % range);
}

std::size_t SimulationContext::pick(std::size_t n) {
  if (n == 0) throw Error("bad-range", "nothing to pick from");
  return static_cast<std::size_t>(uniform(0, static_cast<Time>(n) - 1));
}

Marking fire(const FlatNet& net, const Marking& m, std::size_t transition, SimulationContext& ctx, Binding* chosen,
             TimeMode mode) {
  Binding b;
  const auto& t = net.transitions.at(transition);
  if (mode == TimeMode::discrete && t.delay) b.delay = ctx.uniform(t.delay->lo, t.delay->hi);
  if (chosen) *chosen = b;
  return fire(net, m, transition, b, mode);
}

bool is_final_marking(const FlatNet& net, const Marking& m) {
  bool any = false;
  for (std::size_t p = 0; p < m.tokens.size(); ++p) {
    if (m.tokens[p].empty()) continue;
    if (!net.places[p].terminal) return false;
    any = true;
  }
  return any;
}

SimulationLog simulate(const FlatNet& net, const SimulationOptions& options) {
  SimulationContext ctx(options.seed);
  SimulationLog log;
  Marking m = net.initial;
  check_marking(net, m);
  const bool timed = options.mode == TimeMode::discrete && net.has_timed_places();
  log.termination = Termination::step_limit;
  while (true) {
    if (is_final_marking(net, m)) {
      log.termination = Termination::proper;
      break;
    }
    if (log.steps.size() >= options.steps) break;
    auto en = enabled(net, m, options.mode);
    if (en.empty()) {
      if (timed) {
        if (auto at = next_enabling_time(net, m)) {
          m.clock = *at;
          continue;
        }
        const bool waiting = std::any_of(net.transitions.begin(), net.transitions.end(),
                                         [&](const auto& t) { return structurally_enabled(t, m); });
        log.termination = waiting ? Termination::time_deadlock : Termination::deadlock;
      } else {
        log.termination = Termination::deadlock;
      }
      break;
    }
    const auto& choice = en[ctx.pick(en.size())];
    SimulationStep step;
    step.clock = m.clock;
    step.transition = choice.transition;
    const auto& t = net.transitions[choice.transition];
    if (options.mode == TimeMode::discrete && t.delay) step.binding.delay = ctx.uniform(t.delay->lo, t.delay->hi);
    Delta delta;
    m = fire_impl(net, m, choice.transition, step.binding, options.mode, &delta);
    step.consumed = std::move(delta.consumed);
    step.produced = std::move(delta.produced);
    log.steps.push_back(std::move(step));
  }
  log.final_marking = std::move(m);
  return log;
}

std::string format_log(const FlatNet& net, const SimulationLog& log) {
  std::ostringstream out;
  out << "# clock | transition | binding | marking-delta\n";
  for (const auto& s : log.steps) {
    out << s.clock << " | " << net.transitions[s.transition].id << " | " << s.binding.to_string() << " |";
    for (const auto& [p, t] : s.consumed) out << " -" << net.places[p].id << ":" << to_string(t);
    for (const auto& [p, t] : s.produced) out << " +" << net.places[p].id << ":" << to_string(t);
    out << "\n";
  }
  out << "# terminated: " << to_string(log.termination) << " after " << log.steps.size() << " steps at clock "
      << log.final_marking.clock << "\n";
  out << "# final marking: " << to_string(net, log.final_marking) << "\n";
  return out.str();
}

} // namespace iodnet
