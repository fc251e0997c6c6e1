#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iodnet/diagram_model.hpp"
#include "iodnet/error.hpp"

namespace iodnet {

/// Unit color set carried by control-flow tokens.
inline constexpr const char* kCtrl = "CTRL";
/// Timed unit color set used for message, event and hold places of timed pages.
inline constexpr const char* kTimedCtrl = "TCTRL";
/// The single value of the unit color sets.
inline constexpr const char* kUnit = "()";

struct ColorSet {
  std::string id;
  std::vector<std::string> values;
  bool timed = false;

  bool contains(std::string_view v) const;
  bool operator==(const ColorSet&) const = default;
};

/// Opaque guard labels are treated as nondeterministic choices (always
/// satisfiable) except the literal label `false`, which never holds.
/// A clock window restricts firing to global clock values inside it.
struct Guard {
  std::vector<std::string> labels;
  std::optional<TimeBounds> clock_window;

  bool unsatisfiable() const;
  bool empty() const { return labels.empty() && !clock_window; }
  std::string to_string() const;
  bool operator==(const Guard&) const = default;
};

enum class PlaceRole { internal, in_port, out_port };
enum class TransitionRole { ordinary, in, out };

std::string_view to_string(PlaceRole r);
std::string_view to_string(TransitionRole r);

struct Page {
  std::string id; // page path, e.g. "Main/Identification"
  std::string diagram;
  DiagramKind kind = DiagramKind::iod;
  std::size_t level = 0;
  std::string parent; // empty for the prime page

  bool operator==(const Page&) const = default;
};

struct Place {
  std::string id;
  std::string page;
  std::string color_set;
  PlaceRole role = PlaceRole::internal;
  bool terminal = false; // image of a final node of the prime page
  std::string label;

  bool operator==(const Place&) const = default;
};

struct Transition {
  std::string id;
  std::string page;
  bool substitution = false;
  std::string subpage; // TrPg, set iff substitution
  TransitionRole role = TransitionRole::ordinary;
  Guard guard;
  std::optional<TimeBounds> delay;
  std::string label;

  bool operator==(const Transition&) const = default;
};

enum class ArcDirection { place_to_transition, transition_to_place };

struct Arc {
  std::string id;
  std::string place;
  std::string transition;
  ArcDirection direction = ArcDirection::place_to_transition;
  std::string color = kUnit;
  std::uint32_t weight = 1;

  bool operator==(const Arc&) const = default;
};

struct SocketBinding {
  std::string transition; // substitution transition
  std::string port;       // port place of the subpage
  std::string socket;     // place adjacent to the substitution transition

  bool operator==(const SocketBinding&) const = default;
};

struct Token {
  std::string color;
  std::optional<Time> timestamp; // present iff the place is timed

  auto operator<=>(const Token&) const = default;
};

struct HcpnModel {
  std::string prime_page;
  std::vector<Page> pages;
  std::vector<ColorSet> color_sets;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  std::vector<SocketBinding> socket_bindings;
  std::map<std::string, std::vector<Token>> initial_marking; // M0 (If folded in)

  const Page* find_page(std::string_view id) const;
  const Place* find_place(std::string_view id) const;
  const Transition* find_transition(std::string_view id) const;
  const ColorSet* find_color_set(std::string_view id) const;
  std::vector<const Place*> places_of(std::string_view page) const;
  std::vector<const Transition*> transitions_of(std::string_view page) const;

  bool operator==(const HcpnModel&) const = default;
};

struct HcpnViolation {
  std::string rule;
  std::string element;
  std::string message;
};

/// Structural invariants of a hierarchical net; empty means well formed.
std::vector<HcpnViolation> check_invariants(const HcpnModel& net);

/// Incremental construction with unique, rule-scoped identifiers.
class NetBuilder {
public:
  NetBuilder();

  /// `<page>/<rule>/<entity>`, suffixed `#k` when already taken.
  std::string make_id(std::string_view page, std::string_view rule, std::string_view entity);

  void add_page(Page page);
  void add_color_set(ColorSet cs);
  std::string add_place(std::string id, std::string page, std::string color_set, PlaceRole role = PlaceRole::internal,
                        std::string label = {});
  std::string add_transition(Transition t);
  std::string add_arc(std::string id, std::string place, std::string transition, ArcDirection dir,
                      std::string color = kUnit, std::uint32_t weight = 1);
  void add_binding(SocketBinding b);
  void mark(const std::string& place, Token token);

  Transition& transition(std::string_view id);
  Place& place(std::string_view id);
  HcpnModel& net() { return net_; }
  HcpnModel build() &&;

private:
  HcpnModel net_;
  std::unordered_map<std::string, std::size_t> taken_;
  std::unordered_map<std::string, std::size_t> place_index_;
  std::unordered_map<std::string, std::size_t> transition_index_;
};

// ---------------------------------------------------------------------------
// Flat nets

struct ArcRef {
  std::string id;
  std::size_t place = 0;
  std::string color = kUnit;
  std::uint32_t weight = 1;

  bool operator==(const ArcRef&) const = default;
};

struct FlatPlace {
  std::string id;
  std::string page;
  std::string color_set;
  bool timed = false;
  bool terminal = false;
  std::string label;

  bool operator==(const FlatPlace&) const = default;
};

struct FlatTransition {
  std::string id;
  std::string page;
  TransitionRole role = TransitionRole::ordinary;
  Guard guard;
  std::optional<TimeBounds> delay;
  std::vector<ArcRef> inputs;
  std::vector<ArcRef> outputs;
  std::string label;

  bool operator==(const FlatTransition&) const = default;
};

/// Per-place sorted token multisets plus the global clock. Place indices
/// refer to FlatNet::places, which is sorted by id, so equal markings have
/// equal encodings.
struct Marking {
  std::vector<std::vector<Token>> tokens;
  Time clock = 0;

  std::size_t count(std::size_t place) const { return tokens[place].size(); }
  std::size_t total() const;
  void add(std::size_t place, Token t);
  bool operator==(const Marking&) const = default;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept;
};

struct FlatNet {
  std::vector<ColorSet> color_sets;
  std::vector<FlatPlace> places;           // sorted by id
  std::vector<FlatTransition> transitions; // sorted by id
  Marking initial;

  std::optional<std::size_t> place_index(std::string_view id) const;
  std::optional<std::size_t> transition_index(std::string_view id) const;
  const ColorSet* find_color_set(std::string_view id) const;
  bool has_timed_places() const;
  Marking empty_marking() const;

  bool operator==(const FlatNet&) const = default;
};

/// Expands every substitution transition into a copy of its page. In- and
/// Out-transitions connect directly to the sockets their ports are bound
/// to; port places disappear. Throws Error("invalid-hcpn") or
/// Error("unbound-socket").
FlatNet flatten(const HcpnModel& net);

Marking initial_marking(const FlatNet& net);
Marking initial_marking(const HcpnModel& net);

/// `{place: token, ...}` listing marked places only.
std::string to_string(const FlatNet& net, const Marking& m);
std::string to_string(const Token& t);

// Serialization ------------------------------------------------------------

std::string to_json(const HcpnModel& net);
HcpnModel hcpn_from_json(std::string_view text); // throws Error("bad-hcpn-json")
std::string to_json(const FlatNet& net);
/// Pages become clusters; substitution transitions are double boxes.
std::string to_dot(const HcpnModel& net);
std::string to_dot(const FlatNet& net);

} // namespace iodnet
