#pragma once

#include <bitset>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "splitsim/lattice.hpp"

namespace splitsim {

// Finite-state cellular automaton with prioritized multiset rules: a rule
// fires if the center label matches and some permutation of the 2d neighbor
// labels matches the pattern slots. First matching rule in list order wins.
using Label = uint8_t;
inline constexpr Label kNoLabel = 0xff;
inline constexpr int kMaxAlphabet = 32;

struct CAState {
  long long t = 0;
  int d = 2;
  Label background = 0;
  SiteMap<Label> cells;  // background-labeled sites are not stored

  Label at(const Site& x) const {
    auto it = cells.find(x);
    return it == cells.end() ? background : it->second;
  }
  void set(const Site& x, Label l) {
    if (l == background)
      cells.erase(x);
    else
      cells[x] = l;
  }
  bool labels_equal(const CAState& o) const {
    return background == o.background && cells == o.cells;
  }
};

// Pattern symbol: a set of labels it accepts (single label, a named class,
// or the wildcard), stored as a bitmask plus the original spelling.
struct PatternSym {
  uint32_t mask = 0;
  std::string text;
};

struct Rule {
  PatternSym center;
  std::vector<PatternSym> nbr;  // exactly 2d entries
  Label result = 0;
};

struct NoMatchingRule : std::runtime_error {
  Site site;
  NoMatchingRule(const std::string& what, Site s)
      : std::runtime_error(what), site(s) {}
};

struct AutomatonSpec {
  std::string name;
  int d = 2;
  std::vector<std::string> alphabet;
  Label background = 0;  // quiescent background label
  std::map<std::string, uint32_t> classes;
  std::vector<Rule> rules;
  CAState initial;
  // Background cells whose neighbors all carry labels in this class keep the
  // background label without a rule search.
  uint32_t quiescent_mask = 0;
  // Rule pairs (earlier, later) that intentionally overlap with different
  // results; priority picks the earlier one. Any other overlap with a
  // different result is an ambiguity and trips the debug check.
  std::vector<std::pair<size_t, size_t>> priority_overrides;

  Label label_id(std::string_view name_) const {
    for (size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == name_) return (Label)i;
    throw std::invalid_argument("unknown label '" + std::string(name_) + "'");
  }
  const std::string& label_name(Label l) const { return alphabet[l]; }

  uint32_t symbol_mask(std::string_view sym) const {
    if (sym == "*") return (1u << alphabet.size()) - 1;
    auto it = classes.find(std::string(sym));
    if (it != classes.end()) return it->second;
    return 1u << label_id(sym);
  }
  PatternSym make_symbol(std::string_view sym) const {
    return PatternSym{symbol_mask(sym), std::string(sym)};
  }
};

namespace detail {

// Can the neighbor labels be assigned one-to-one to the pattern slots?
// Subset DP over used slots; at most 2*kMaxDim = 8 slots.
inline bool multiset_match(const std::vector<PatternSym>& slots,
                           const Label* nbrs, int n) {
  std::bitset<256> reach;
  reach.set(0);
  for (int i = 0; i < n; ++i) {
    std::bitset<256> next;
    uint32_t bit = 1u << nbrs[i];
    for (int s = 0; s < (1 << n); ++s) {
      if (!reach.test(s)) continue;
      for (int j = 0; j < n; ++j)
        if (!(s & (1 << j)) && (slots[j].mask & bit)) next.set(s | (1 << j));
    }
    reach = next;
    if (reach.none()) return false;
  }
  return reach.test((1 << n) - 1);
}

inline uint64_t neighborhood_key(Label center, const Label* nbrs, int n) {
  Label sorted[2 * kMaxDim];
  std::copy(nbrs, nbrs + n, sorted);
  std::sort(sorted, sorted + n);
  uint64_t key = center;
  for (int i = 0; i < n; ++i) key = (key << 5) | sorted[i];
  return key;
}

}  // namespace detail

// Evaluates one site against the rule list. Throws NoMatchingRule when no
// rule applies: the rule lists here are meant to be exhaustive over the
// neighborhoods that actually occur, so a miss is a finding, not a fallback.
class CARunner {
 public:
  explicit CARunner(const AutomatonSpec& spec, bool check_ambiguity = false)
      : spec_(&spec), state_(spec.initial), check_ambiguity_(check_ambiguity) {}

  const CAState& state() const { return state_; }
  CAState& state() { return state_; }
  const AutomatonSpec& spec() const { return *spec_; }

  Label apply_rules(const Site& site, Label center, const Label* nbrs, int n) {
    uint64_t key = detail::neighborhood_key(center, nbrs, n);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      if (it->second == kNoLabel) throw_no_match(site, center, nbrs, n);
      return it->second;
    }
    Label found = kNoLabel;
    size_t found_idx = 0;
    for (size_t r = 0; r < spec_->rules.size(); ++r) {
      const Rule& rule = spec_->rules[r];
      if (!(rule.center.mask & (1u << center))) continue;
      if (!detail::multiset_match(rule.nbr, nbrs, n)) continue;
      if (found == kNoLabel) {
        found = rule.result;
        found_idx = r;
        if (!check_ambiguity_) break;
      } else if (rule.result != found && !is_override(found_idx, r)) {
        throw std::logic_error("ambiguous rules " + std::to_string(found_idx + 1) +
                               " and " + std::to_string(r + 1) + " for center '" +
                               spec_->label_name(center) + "'");
      }
    }
    cache_[key] = found;
    if (found == kNoLabel) throw_no_match(site, center, nbrs, n);
    return found;
  }

  void step() {
    const CAState& cur = state_;
    CAState next;
    next.t = cur.t + 1;
    next.d = cur.d;
    next.background = cur.background;

    Region eval;
    for (const auto& [site, lab] : cur.cells) {
      eval.insert(site);
      for (const Site& nb : neighbors(site)) eval.insert(nb);
    }
    Label nbrs[2 * kMaxDim];
    for (const Site& site : eval) {
      Label center = cur.at(site);
      int n = 0;
      uint32_t all = 0;
      for (const Site& nb : neighbors(site)) {
        Label l = cur.at(nb);
        nbrs[n++] = l;
        all |= 1u << l;
      }
      Label out;
      if (center == cur.background && spec_->quiescent_mask &&
          (all & ~spec_->quiescent_mask) == 0) {
        out = center;  // quiescent fast path
      } else {
        out = apply_rules(site, center, nbrs, n);
      }
      next.set(site, out);
    }
    state_ = std::move(next);
  }

  void run_to(long long t) {
    while (state_.t < t) step();
  }

 private:
  bool is_override(size_t first, size_t later) const {
    for (const auto& [a, b] : spec_->priority_overrides)
      if (a == first && b == later) return true;
    return false;
  }
  [[noreturn]] void throw_no_match(const Site& site, Label center,
                                   const Label* nbrs, int n) const {
    std::string msg = "no rule for center '" + spec_->label_name(center) +
                      "' with neighbors {";
    for (int i = 0; i < n; ++i)
      msg += (i ? ", " : "") + spec_->label_name(nbrs[i]);
    msg += "} at site (";
    for (int i = 0; i < site.dim(); ++i)
      msg += (i ? "," : "") + std::to_string(site[i]);
    msg += ")";
    throw NoMatchingRule(msg, site);
  }

  const AutomatonSpec* spec_;
  CAState state_;
  bool check_ambiguity_;
  std::unordered_map<uint64_t, Label> cache_;
};

// One parallel update of all cells that could change.
inline CAState ca_step(const AutomatonSpec& spec, const CAState& state) {
  CARunner runner(spec);
  runner.state() = state;
  runner.step();
  return runner.state();
}

// Cells that do not carry the background label.
inline Region growth_cluster(const CAState& state) {
  Region out;
  for (const auto& [site, lab] : state.cells) out.insert(site);
  return out;
}

inline long long cluster_radius_linf(const CAState& state) {
  long long r = 0;
  for (const auto& [site, lab] : state.cells)
    r = std::max(r, site.linf_norm());
  return r;
}

namespace detail {
inline Rule make_rule(const AutomatonSpec& spec, std::string_view center,
                      std::initializer_list<std::string_view> nbrs,
                      std::string_view result) {
  Rule r;
  r.center = spec.make_symbol(center);
  for (auto s : nbrs) r.nbr.push_back(spec.make_symbol(s));
  r.result = spec.label_id(result);
  return r;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Built-in automaton: diamond growth (any dimension).
// Labels: e empty, h background, u unstable.
inline AutomatonSpec builtin_diamond(int d) {
  AutomatonSpec spec;
  spec.name = "diamond";
  spec.d = d;
  spec.alphabet = {"e", "h", "u"};
  spec.background = spec.label_id("h");
  spec.classes["s"] = spec.symbol_mask("e") | spec.symbol_mask("h");
  spec.quiescent_mask = spec.classes["s"];
  auto rule = [&](std::string_view center, std::vector<std::string_view> pat,
                  std::string_view result) {
    Rule r;
    r.center = spec.make_symbol(center);
    for (auto s : pat) r.nbr.push_back(spec.make_symbol(s));
    r.result = spec.label_id(result);
    spec.rules.push_back(std::move(r));
  };
  std::vector<std::string_view> all_s(2 * d, "s");
  std::vector<std::string_view> all_u(2 * d, "u");
  std::vector<std::string_view> one_u(2 * d, "*");
  one_u[0] = "u";
  rule("h", all_s, "h");
  rule("s", all_u, "u");
  rule("u", all_s, "e");
  rule("h", one_u, "u");
  spec.initial.d = d;
  spec.initial.background = spec.background;
  spec.initial.set(Site::origin(d), spec.label_id("u"));
  return spec;
}

// ---------------------------------------------------------------------------
// Built-in automaton: square growth (d = 2).
// Labels: e, h, p primed, m moving front, mp spent corner feed, c core,
// d heavy front.
inline AutomatonSpec builtin_square() {
  AutomatonSpec spec;
  spec.name = "square";
  spec.d = 2;
  spec.alphabet = {"e", "h", "p", "m", "mp", "c", "d"};
  spec.background = spec.label_id("h");
  spec.classes["s"] =
      spec.symbol_mask("e") | spec.symbol_mask("h") | spec.symbol_mask("p");
  spec.quiescent_mask = spec.classes["s"];
  auto rule = [&](std::string_view c, std::initializer_list<std::string_view> p,
                  std::string_view res) {
    spec.rules.push_back(detail::make_rule(spec, c, p, res));
  };
  rule("h", {"s", "s", "s", "s"}, "h");    // 1
  rule("p", {"s", "s", "s", "s"}, "p");    // 2
  rule("c", {"*", "*", "*", "*"}, "c");    // 3
  rule("m", {"*", "*", "*", "*"}, "e");    // 4
  rule("d", {"*", "*", "*", "*"}, "c");    // 5
  rule("mp", {"*", "*", "*", "*"}, "c");   // 6
  rule("h", {"d", "s", "s", "s"}, "m");    // 7
  rule("h", {"m", "s", "s", "s"}, "p");    // 8
  rule("p", {"m", "m", "mp", "s"}, "d");   // 9
  rule("h", {"d", "m", "s", "s"}, "d");    // 10
  rule("h", {"m", "m", "s", "s"}, "d");    // 11
  rule("e", {"d", "d", "c", "p"}, "mp");   // 12
  spec.initial.d = 2;
  spec.initial.background = spec.background;
  spec.initial.set(Site::origin(2), spec.label_id("d"));
  return spec;
}

// ---------------------------------------------------------------------------
// Built-in automaton: octagon growth (d = 2).
// Labels: e, h, p, m, d, dp (d'), dx (d!), c, cp (c'), q, qp (q').
inline AutomatonSpec builtin_octagon() {
  AutomatonSpec spec;
  spec.name = "octagon";
  spec.d = 2;
  spec.alphabet = {"e", "h", "p", "m", "d", "dp", "dx", "c", "cp", "q", "qp"};
  spec.background = spec.label_id("h");
  spec.classes["s"] =
      spec.symbol_mask("e") | spec.symbol_mask("h") | spec.symbol_mask("p");
  uint32_t all = (1u << spec.alphabet.size()) - 1;
  spec.classes["u"] = all & ~spec.classes["s"];
  spec.quiescent_mask = spec.classes["s"];
  auto rule = [&](std::string_view c, std::initializer_list<std::string_view> p,
                  std::string_view res) {
    spec.rules.push_back(detail::make_rule(spec, c, p, res));
  };
  rule("h", {"s", "s", "s", "s"}, "h");      // 1
  rule("u", {"*", "*", "*", "*"}, "e");      // 2
  rule("h", {"m", "s", "s", "s"}, "p");      // 3
  rule("h", {"d", "s", "s", "s"}, "m");      // 4
  rule("h", {"dp", "s", "s", "s"}, "m");     // 5
  rule("h", {"dx", "s", "s", "s"}, "m");     // 6
  rule("h", {"q", "s", "s", "s"}, "d");      // 7
  rule("h", {"q", "m", "s", "s"}, "dx");     // 8
  rule("h", {"qp", "m", "s", "s"}, "dx");    // 9
  rule("h", {"m", "dp", "s", "s"}, "dp");    // 10
  rule("h", {"dp", "dp", "s", "s"}, "dp");   // 11
  rule("p", {"dx", "m", "c", "s"}, "qp");    // 12
  rule("p", {"m", "m", "c", "s"}, "q");      // 13
  rule("p", {"d", "m", "c", "s"}, "q");      // 14
  rule("e", {"qp", "c", "dp", "s"}, "c");    // 15
  rule("e", {"dx", "dx", "cp", "s"}, "c");   // 16
  rule("e", {"q", "c", "dx", "s"}, "c");     // 17
  rule("e", {"qp", "c", "dx", "s"}, "c");    // 18
  // The corner-refill exception outranks the generic all-unstable rule, so
  // it is listed first; the pair is a sanctioned overlap.
  rule("e", {"m", "q", "q", "c"}, "cp");     // 20 (listed before 19)
  rule("e", {"u", "u", "u", "u"}, "c");      // 19
  spec.priority_overrides.emplace_back(spec.rules.size() - 2,
                                       spec.rules.size() - 1);
  // A primed cell with no splitting neighbor keeps its mass. The published
  // rule list omits this case, but the very first step runs into it: the
  // initial state has p cells whose neighbors are all stable.
  rule("p", {"s", "s", "s", "s"}, "p");      // 21


  // First-quadrant initial labels, origin at (0,0); the other quadrants
  // follow by sign symmetry (the table is already diagonal-symmetric).
  static constexpr const char* kQuadrant[7] = {
      "c e c e cp e p",  // y = 0
      "e c e c e dx",    // y = 1
      "c e c e c p",     // y = 2
      "e c e c e m",     // y = 3
      "cp e c e dp",     // y = 4
      "e dx p m",        // y = 5
      "p",               // y = 6
  };
  spec.initial.d = 2;
  spec.initial.background = spec.background;
  for (int y = 0; y < 7; ++y) {
    std::istringstream row(kQuadrant[y]);
    std::string tok;
    int x = 0;
    while (row >> tok) {
      Label l = spec.label_id(tok);
      for (int sx : {-1, 1})
        for (int sy : {-1, 1})
          spec.initial.set(Site::of({sx * x, sy * y}), l);
      ++x;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Recurrent patterns the square and octagon automata settle into.

// Square pattern at stage r: full core of side 2r-1, an alternating d/e ring
// at radius r, and p caps outside next to every e.
inline CAState square_period_state(int r) {
  if (r < 0) throw std::invalid_argument("stage must be >= 0");
  AutomatonSpec spec = builtin_square();
  CAState out;
  out.d = 2;
  out.t = 2 * r;
  out.background = spec.background;
  Label e = spec.label_id("e"), c = spec.label_id("c"), d = spec.label_id("d"),
        p = spec.label_id("p");
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j) {
      int m = std::max(std::abs(i), std::abs(j));
      if (m <= r - 1)
        out.set(Site::of({i, j}), c);
      else
        out.set(Site::of({i, j}), ((i - j) % 2 + 2) % 2 == 0 ? d : e);
    }
  // p outside the ring wherever a neighbor is labeled e
  std::vector<std::pair<Site, Label>> caps;
  for (const auto& [site, lab] : out.cells) {
    if (lab != e) continue;
    for (const Site& nb : neighbors(site))
      if (std::max(std::abs(nb[0]), std::abs(nb[1])) > r) caps.push_back({nb, p});
  }
  for (auto& [site, lab] : caps) out.set(site, lab);
  return out;
}

// Octagon pattern at stage i: a cornerstone block on the diagonal, a growing
// staircase of tile blocks near the axis (the topmost one modified), the
// region screened by them left at background, and an e/c checkerboard
// everywhere else. Defined on the first octant and extended by symmetry.
inline CAState octagon_period_state(int stage) {
  if (stage < 0) throw std::invalid_argument("stage must be >= 0");
  AutomatonSpec spec = builtin_octagon();
  auto id = [&](const char* s) { return spec.label_id(s); };
  const Label E = id("e"), H = id("h"), P = id("p"), M = id("m"), C = id("c"),
              CP = id("cp"), DP = id("dp"), DX = id("dx"), QP = id("qp");

  // Block patterns, rows listed bottom to top.
  const std::vector<std::vector<Label>> tile = {
      {C, E, C, E, QP}, {E, DX, P, M, H}, {P, H, H, H, H}};
  const std::vector<std::vector<Label>> cornerstone = {
      {E, C, E, P}, {C, E, DP, H}, {E, DP, H, H}, {P, H, H, H}};

  const int radius = 9 + 6 * stage;
  const int n = radius + 1;
  std::vector<Label> grid((size_t)n * n, kNoLabel);  // first quadrant
  std::vector<uint8_t> blocked((size_t)n * n, 0);
  auto idx = [n](int x, int y) { return (size_t)y * n + x; };
  auto place = [&](const std::vector<std::vector<Label>>& pat, int px, int py,
                   bool transpose) {
    for (int dy = 0; dy < (int)pat.size(); ++dy)
      for (int dx = 0; dx < (int)pat[dy].size(); ++dx) {
        int x = transpose ? py + dy : px + dx;
        int y = transpose ? px + dx : py + dy;
        if (x >= n || y >= n) continue;
        grid[idx(x, y)] = pat[dy][dx];
        blocked[idx(x, y)] = 1;
      }
  };
  int cpos = 5 * (stage + 1);
  place(cornerstone, cpos, cpos, false);
  for (int j = 0; j <= stage; ++j) {
    place(tile, 5 * (stage - j), 7 + 5 * stage + j, false);
    place(tile, 5 * (stage - j), 7 + 5 * stage + j, true);
  }
  // The topmost tile differs in one cell (and its mirror).
  grid[idx(0, 7 + 6 * stage)] = CP;
  grid[idx(7 + 6 * stage, 0)] = CP;

  // A cell outside the blocks is screened if every staircase path toward the
  // origin has to pass through a block.
  std::vector<uint8_t> open((size_t)n * n, 0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (blocked[idx(x, y)]) continue;
      if (x == 0 && y == 0)
        open[idx(x, y)] = 1;
      else
        open[idx(x, y)] = (x > 0 && open[idx(x - 1, y)]) ||
                          (y > 0 && open[idx(x, y - 1)]);
    }
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (grid[idx(x, y)] != kNoLabel) continue;
      if (!open[idx(x, y)])
        grid[idx(x, y)] = H;
      else
        grid[idx(x, y)] = (x + y) % 2 == 0 ? E : C;
    }

  CAState out;
  out.d = 2;
  out.t = 5 + 10 * stage;
  out.background = spec.background;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      Label l = grid[idx(x, y)];
      if (l == H) continue;
      for (int sx : {-1, 1})
        for (int sy : {-1, 1})
          out.set(Site::of({sx * x, sy * y}), l);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Recurrence verification: run the automaton and compare against the
// constructed pattern at each scheduled time. Mismatches are findings.

struct RecurrenceMismatch {
  int index = 0;
  long long t = 0;
  Site site;
  Label expected = 0;
  Label actual = 0;
};

struct RecurrenceReport {
  bool success = true;
  int checked = 0;
  std::optional<RecurrenceMismatch> first_mismatch;
};

inline RecurrenceReport verify_recurrence(
    const AutomatonSpec& spec, const std::function<CAState(int)>& expected_at,
    const std::vector<std::pair<int, long long>>& schedule,
    bool check_ambiguity = false) {
  CARunner runner(spec, check_ambiguity);
  RecurrenceReport report;
  for (const auto& [index, t] : schedule) {
    runner.run_to(t);
    CAState expected = expected_at(index);
    if (!runner.state().labels_equal(expected)) {
      report.success = false;
      RecurrenceMismatch mm;
      mm.index = index;
      mm.t = t;
      Region sites;
      for (const auto& [s, l] : runner.state().cells) sites.insert(s);
      for (const auto& [s, l] : expected.cells) sites.insert(s);
      for (const Site& s : sorted_sites(sites)) {
        if (runner.state().at(s) != expected.at(s)) {
          mm.site = s;
          mm.expected = expected.at(s);
          mm.actual = runner.state().at(s);
          break;
        }
      }
      report.first_mismatch = mm;
      return report;
    }
    ++report.checked;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Plain-text rule format. Header lines declare the automaton, then one rule
// per line as `center | n1 n2 ... n2d -> result`, then the initial labels.

inline std::string serialize_spec(const AutomatonSpec& spec) {
  std::ostringstream out;
  out << "automaton " << spec.name << "\n";
  out << "dim " << spec.d << "\n";
  out << "alphabet";
  for (const auto& l : spec.alphabet) out << " " << l;
  out << "\n";
  out << "default " << spec.label_name(spec.background) << "\n";
  for (const auto& [name, mask] : spec.classes) {
    out << "class " << name << " =";
    for (size_t i = 0; i < spec.alphabet.size(); ++i)
      if (mask & (1u << i)) out << " " << spec.alphabet[i];
    out << "\n";
  }
  for (const auto& [a, b] : spec.priority_overrides)
    out << "override " << (a + 1) << " " << (b + 1) << "\n";
  for (const Rule& r : spec.rules) {
    out << "rule " << r.center.text << " |";
    for (const PatternSym& p : r.nbr) out << " " << p.text;
    out << " -> " << spec.label_name(r.result) << "\n";
  }
  out << "initial\n";
  std::vector<Site> sites;
  for (const auto& [s, l] : spec.initial.cells) sites.push_back(s);
  std::sort(sites.begin(), sites.end());
  for (const Site& s : sites) {
    for (int i = 0; i < s.dim(); ++i) out << s[i] << " ";
    out << spec.label_name(spec.initial.at(s)) << "\n";
  }
  out << "end\n";
  return out.str();
}

inline AutomatonSpec parse_spec(std::istream& in) {
  AutomatonSpec spec;
  spec.alphabet.clear();
  std::string line;
  bool in_initial = false;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("rule file line " + std::to_string(lineno) +
                                ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (in_initial) {
      if (word == "end") {
        in_initial = false;
        continue;
      }
      Site s = Site::origin(spec.d);
      s.c[0] = std::stoi(word);
      for (int i = 1; i < spec.d; ++i) {
        int v;
        if (!(ls >> v)) fail("missing coordinate");
        s.c[i] = v;
      }
      std::string lab;
      if (!(ls >> lab)) fail("missing label");
      spec.initial.set(s, spec.label_id(lab));
    } else if (word == "automaton") {
      ls >> spec.name;
    } else if (word == "dim") {
      ls >> spec.d;
      if (spec.d < 1 || spec.d > kMaxDim) fail("dimension out of range");
    } else if (word == "alphabet") {
      std::string l;
      while (ls >> l) spec.alphabet.push_back(l);
      if (spec.alphabet.size() > kMaxAlphabet) fail("alphabet too large");
    } else if (word == "default") {
      std::string l;
      ls >> l;
      spec.background = spec.label_id(l);
      spec.initial.background = spec.background;
      spec.initial.d = spec.d;
    } else if (word == "class") {
      std::string name, eq, l;
      ls >> name >> eq;
      if (eq != "=") fail("expected '=' in class declaration");
      uint32_t mask = 0;
      while (ls >> l) mask |= 1u << spec.label_id(l);
      spec.classes[name] = mask;
    } else if (word == "override") {
      size_t a, b;
      ls >> a >> b;
      spec.priority_overrides.emplace_back(a - 1, b - 1);
    } else if (word == "rule") {
      Rule r;
      std::string sym;
      ls >> sym;
      r.center = spec.make_symbol(sym);
      std::string bar;
      ls >> bar;
      if (bar != "|") fail("expected '|' after rule center");
      std::vector<std::string> pats;
      while (ls >> sym && sym != "->") pats.push_back(sym);
      if (sym != "->") fail("expected '->' in rule");
      if ((int)pats.size() != 2 * spec.d) fail("rule needs 2d neighbor symbols");
      for (const auto& p : pats) r.nbr.push_back(spec.make_symbol(p));
      if (!(ls >> sym)) fail("missing rule result");
      r.result = spec.label_id(sym);
      spec.rules.push_back(std::move(r));
    } else if (word == "initial") {
      in_initial = true;
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  // The background must be quiescent when fully surrounded by itself.
  auto sit = spec.classes.find("s");
  spec.quiescent_mask = sit != spec.classes.end() ? sit->second
                                                  : (1u << spec.background);
  CARunner probe(spec);
  Label nbrs[2 * kMaxDim];
  std::fill(nbrs, nbrs + 2 * spec.d, spec.background);
  if (probe.apply_rules(Site::origin(spec.d), spec.background, nbrs,
                        2 * spec.d) != spec.background)
    throw std::invalid_argument("background label is not quiescent");
  return spec;
}

inline AutomatonSpec parse_spec(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

}  // namespace splitsim
