#pragma once

// Scenario files: INI-like sections declaring a chart and named objects,
// plus `check <name> key=value ...` directives.
//
//   [chart]                      base = "t, x"   middle = "s"   fibre = "u"
//   [section h]                  level = sigma|ysigma|y|yh, then one key per component
//   [connection G]               type = plain|base|sigma|linear|symmetric, indexed entries
//   [lagrangian L]               L = "..."  or  F = "..." with through = <sigma connection>
//   [tetrad e]                   h[lambda,a] = "..."  (missing entries from the identity)
//   [spin-connection S]          K = <symmetric connection>  (omitted: K = 0)
//   [spinor-jet J]               y[A] = "a+b*i", dy[lambda,A] = "..."  (missing: symbolic)
//
// Indices are coordinate names or 0-based positions, optionally tagged:
// A[i=u,m=s] and A[0,0] address the same entry.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "jetcalc/bundle.hpp"
#include "jetcalc/connection.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/legendre.hpp"
#include "jetcalc/spinor.hpp"

namespace jetcalc {

/// Parse or declaration error with a 1-based line and column.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& what, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

inline const std::vector<std::string>& check_catalog() {
  static const std::vector<std::string> names = {
      "splitting",       "vcd-restriction", "composite-reduction", "rho-prolong",
      "dual-pairing",    "tensor-leibniz",  "hamiltonian-lift",    "legendre-constraint",
      "clifford",        "gamma-h-metric",  "total-dirac-restriction", "char-form"};
  return names;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string nearest_check(std::string_view name) {
  std::string best;
  std::size_t dist = std::string::npos;
  for (const auto& c : check_catalog())
    if (auto d = edit_distance(name, c); d < dist) {
      dist = d;
      best = c;
    }
  return best;
}

/// Canonical check name, resolving aliases; empty when unknown.
inline std::string canonical_check(const std::string& name) {
  if (name == "reduction-coherence") return "composite-reduction";
  const auto& cat = check_catalog();
  return std::find(cat.begin(), cat.end(), name) != cat.end() ? name : std::string();
}

struct CheckDirective {
  std::string name;  // canonical
  std::string label; // as written
  std::map<std::string, std::string> args;
  int line = 0;

  std::string arg(const std::string& key, const std::string& fallback = {}) const {
    auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
  }
};

struct Scenario {
  std::optional<CompositeChart> chart;
  std::map<std::string, Section> sections;
  std::map<std::string, Connection> connections;  // plain (Y -> X) and base (Sigma -> X)
  std::map<std::string, SigmaConnection> sigma_connections;
  std::map<std::string, LinearConnection> linear_connections;
  std::map<std::string, SymmetricConnection> symmetric_connections;
  std::map<std::string, Lagrangian> lagrangians;
  std::map<std::string, Tetrad> tetrads;
  std::map<std::string, std::string> spin_connections;  // name -> K ("" for K = 0)
  std::map<std::string, SpinorJet> spinor_jets;
  std::vector<CheckDirective> checks;
};

namespace detail {

struct Entry {
  std::string key;
  std::vector<std::pair<std::string, std::string>> index;  // (tag, value); tag may be empty
  std::string value;
  int line, key_col, value_col;
};

struct Block {
  std::string kind, name;
  int line;
  std::vector<Entry> entries;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Removes a trailing comment outside double quotes.
inline std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class ScenarioBuilder {
 public:
  Scenario build(const std::string& text) {
    parse_lines(text);
    for (const auto& b : blocks_) apply(b);
    for (const auto& c : scenario_.checks) validate_check(c);
    return std::move(scenario_);
  }

 private:
  void parse_lines(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const std::string s = trim(strip_comment(raw));
      if (s.empty()) continue;
      const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
      if (s.front() == '[') {
        if (s.back() != ']') throw ScenarioError("unterminated section header", line, indent);
        const auto words = split_words(s.substr(1, s.size() - 2));
        if (words.empty() || words.size() > 2) throw ScenarioError("expected [kind] or [kind name]", line, indent);
        blocks_.push_back(Block{words[0], words.size() == 2 ? words[1] : std::string(), line, {}});
        continue;
      }
      if (s.rfind("check", 0) == 0 && (s.size() == 5 || s[5] == ' ' || s[5] == '\t')) {
        parse_check(s, line, indent);
        continue;
      }
      if (blocks_.empty()) throw ScenarioError("entry outside of any section", line, indent);
      blocks_.back().entries.push_back(parse_entry(raw, line));
    }
  }

  static std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
  }

  static std::string unquote(const std::string& v, int line, int col) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (!v.empty() && (v.front() == '"' || v.back() == '"')) throw ScenarioError("unbalanced quotes", line, col);
    return v;
  }

  Entry parse_entry(const std::string& raw, int line) {
    const std::string body(strip_comment(raw));
    const int key_col = static_cast<int>(body.find_first_not_of(" \t")) + 1;
    auto eq = body.find('=');
    // an '=' inside an index belongs to the key
    if (const auto open = body.find('['); open != std::string::npos && open < eq) {
      const auto close = body.find(']', open);
      eq = close == std::string::npos ? std::string::npos : body.find('=', close);
    }
    if (eq == std::string::npos) throw ScenarioError("expected key = value", line, key_col);
    return make_entry(body, eq, line, key_col);
  }

  static Entry make_entry(const std::string& body, std::size_t eq, int line, int key_col) {
    Entry e;
    e.line = line;
    e.key_col = key_col;
    std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string rhs = std::string(body.substr(eq + 1));
    const auto first = rhs.find_first_not_of(" \t");
    if (first == std::string::npos) throw ScenarioError("missing value", line, static_cast<int>(eq) + 2);
    e.value_col = static_cast<int>(eq + 1 + first) + 1;
    const std::string v = trim(rhs);
    if (!v.empty() && v.front() == '"') ++e.value_col;
    e.value = unquote(v, line, e.value_col);
    if (auto open = key.find('['); open != std::string::npos) {
      if (key.back() != ']') throw ScenarioError("malformed index in key", line, key_col);
      for (const auto& part : split_list(key.substr(open + 1, key.size() - open - 2))) {
        const auto q = part.find('=');
        if (q == std::string::npos)
          e.index.emplace_back("", part);
        else
          e.index.emplace_back(trim(part.substr(0, q)), trim(part.substr(q + 1)));
      }
      key = trim(key.substr(0, open));
    }
    if (key.empty()) throw ScenarioError("empty key", line, key_col);
    e.key = key;
    return e;
  }

  void parse_check(const std::string& s, int line, int col) {
    auto words = split_words(s);
    if (words.size() < 2) throw ScenarioError("check directive needs a name", line, col);
    CheckDirective c;
    c.label = words[1];
    c.name = canonical_check(words[1]);
    c.line = line;
    if (c.name.empty())
      throw ScenarioError("unknown check '" + words[1] + "' (did you mean '" + nearest_check(words[1]) + "'?)", line, col);
    for (std::size_t i = 2; i < words.size(); ++i) {
      const auto q = words[i].find('=');
      if (q == std::string::npos) throw ScenarioError("expected key=value in check arguments", line, col);
      c.args[words[i].substr(0, q)] = unquote(words[i].substr(q + 1), line, col);
    }
    scenario_.checks.push_back(std::move(c));
  }

  // -- object construction ---------------------------------------------------

  const CompositeChart& chart(int line) const {
    if (!scenario_.chart) throw ScenarioError("declare [chart] before chart-dependent objects", line, 1);
    return *scenario_.chart;
  }

  Expr expr(const Entry& e) const {
    try {
      return parse_expr(e.value, true);
    } catch (const SyntaxError& err) {
      throw ScenarioError("syntax error: " + err.reason(), e.line, e.value_col + static_cast<int>(err.position()));
    }
  }

  Expr expr_over(const Entry& e, const std::vector<std::string>& domain) const {
    Expr v = expr(e);
    try {
      require_symbols_in(v, domain);
    } catch (const UnknownCoordinate& err) {
      throw ScenarioError(err.what(), e.line, e.value_col);
    }
    return v;
  }

  static std::size_t resolve(const Entry& e, std::size_t slot, const std::vector<std::string>& names,
                             const std::string& what) {
    if (slot >= e.index.size()) throw ScenarioError("missing index " + what, e.line, e.key_col);
    const std::string& v = e.index[slot].second;
    auto it = std::find(names.begin(), names.end(), v);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
    if (!v.empty() && std::all_of(v.begin(), v.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const std::size_t k = std::stoul(v);
      if (k < names.size()) return k;
    }
    throw ScenarioError("index '" + v + "' out of range for " + what, e.line, e.key_col);
  }

  static void require_arity(const Entry& e, std::size_t n) {
    if (e.index.size() != n)
      throw ScenarioError("'" + e.key + "' takes " + std::to_string(n) + " indices", e.line, e.key_col);
  }

  static std::string entry_value(const Block& b, const std::string& key) {
    for (const auto& e : b.entries)
      if (e.key == key && e.index.empty()) return e.value;
    return {};
  }

  void declare(const Block& b) {
    if (b.name.empty()) throw ScenarioError("[" + b.kind + "] needs a name", b.line, 1);
    if (!names_.insert(b.name).second) throw ScenarioError("duplicate object name '" + b.name + "'", b.line, 1);
  }

  void apply(const Block& b) {
    if (b.kind == "chart") return apply_chart(b);
    declare(b);
    if (b.kind == "section") return apply_section(b);
    if (b.kind == "connection") return apply_connection(b);
    if (b.kind == "lagrangian") return apply_lagrangian(b);
    if (b.kind == "tetrad") return apply_tetrad(b);
    if (b.kind == "spin-connection") return apply_spin_connection(b);
    if (b.kind == "spinor-jet") return apply_spinor_jet(b);
    throw ScenarioError("unknown section kind '" + b.kind + "'", b.line, 2);
  }

  void apply_chart(const Block& b) {
    if (scenario_.chart) throw ScenarioError("chart declared twice", b.line, 1);
    std::vector<std::string> base, middle, fibre;
    for (const auto& e : b.entries) {
      auto names = split_list(e.value);
      for (const auto& n : names)
        if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_') ||
            !std::all_of(n.begin(), n.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }))
          throw ScenarioError("invalid coordinate name '" + n + "'", e.line, e.value_col);
      if (e.key == "base")
        base = names;
      else if (e.key == "middle")
        middle = names;
      else if (e.key == "fibre")
        fibre = names;
      else
        throw ScenarioError("unknown chart key '" + e.key + "'", e.line, e.key_col);
    }
    try {
      scenario_.chart.emplace(base, middle, fibre);
    } catch (const Error& err) {
      throw ScenarioError(err.what(), b.line, 1);
    }
  }

  void apply_section(const Block& b) {
    const auto& ch = chart(b.line);
    const std::string level = entry_value(b, "level");
    Section s;
    if (level == "sigma")
      s.kind = SectionKind::SigmaOverX;
    else if (level == "ysigma")
      s.kind = SectionKind::FibreOverSigma;
    else if (level == "y")
      s.kind = SectionKind::TotalOverX;
    else if (level == "yh")
      s.kind = SectionKind::RestrictedOverX;
    else
      throw ScenarioError("section level must be sigma, ysigma, y or yh", b.line, 1);
    const auto source = s.kind == SectionKind::FibreOverSigma ? ch.sigma_coords() : ch.base();
    for (const auto& e : b.entries) {
      if (e.key == "level") continue;
      s.components[e.key] = expr_over(e, source);
    }
    try {
      validate(ch, s);
    } catch (const Error& err) {
      throw ScenarioError(err.what(), b.line, 1);
    }
    scenario_.sections.emplace(b.name, std::move(s));
  }

  void apply_connection(const Block& b) {
    const auto& ch = chart(b.line);
    const std::string type = entry_value(b, "type");
    const auto base = ch.base();
    if (type == "plain" || type == "base") {
      Connection c = type == "plain" ? Connection::on_total(ch) : Connection::on_sigma(ch);
      for (const auto& e : b.entries) {
        if (e.key == "type") continue;
        if (e.key != "Gamma") throw ScenarioError("expected Gamma[A,lambda] entries", e.line, e.key_col);
        require_arity(e, 2);
        c.coef[resolve(e, 0, c.vertical, "vertical direction")][resolve(e, 1, base, "base direction")] =
            expr_over(e, c.domain);
      }
      scenario_.connections.emplace(b.name, std::move(c));
    } else if (type == "sigma") {
      SigmaConnection c(ch);
      for (const auto& e : b.entries) {
        if (e.key == "type") continue;
        require_arity(e, 2);
        const std::size_t i = resolve(e, 0, ch.fibre(), "fibre direction");
        if (e.key == "Atilde")
          c.tilde[i][resolve(e, 1, base, "base direction")] = expr_over(e, ch.y_coords());
        else if (e.key == "A")
          c.a[i][resolve(e, 1, ch.middle(), "middle direction")] = expr_over(e, ch.y_coords());
        else
          throw ScenarioError("expected Atilde[i,lambda] or A[i,m] entries", e.line, e.key_col);
      }
      scenario_.sigma_connections.emplace(b.name, std::move(c));
    } else if (type == "linear") {
      LinearConnection c = LinearConnection::zero(base, ch.middle(), ch.fibre());
      for (const auto& e : b.entries) {
        if (e.key == "type") continue;
        if (e.key == "Gamma") {
          require_arity(e, 2);
          c.gamma[resolve(e, 0, ch.middle(), "middle direction")][resolve(e, 1, base, "base direction")] =
              expr_over(e, c.domain());
        } else if (e.key == "A") {
          require_arity(e, 3);
          const std::size_t i = resolve(e, 0, ch.fibre(), "fibre direction");
          const std::size_t j = resolve(e, 1, ch.fibre(), "fibre direction");
          c.a[resolve(e, 2, base, "base direction")][i][j] = expr_over(e, c.domain());
        } else {
          throw ScenarioError("expected Gamma[m,lambda] or A[i,j,lambda] entries", e.line, e.key_col);
        }
      }
      scenario_.linear_connections.emplace(b.name, std::move(c));
    } else if (type == "symmetric") {
      SymmetricConnection k = SymmetricConnection::zero(base);
      std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Expr> given;
      for (const auto& e : b.entries) {
        if (e.key == "type") continue;
        if (e.key != "K") throw ScenarioError("expected K[mu,nu,lambda] entries", e.line, e.key_col);
        require_arity(e, 3);
        const std::size_t mu = resolve(e, 0, base, "base direction"), nu = resolve(e, 1, base, "base direction"),
                          la = resolve(e, 2, base, "base direction");
        const Expr v = expr_over(e, base);
        if (auto it = given.find({mu, la, nu}); it != given.end() && it->second != v)
          throw ScenarioError("K is not symmetric in its lower indices", e.line, e.key_col);
        given[{mu, nu, la}] = v;
        k.set(mu, nu, la, v);
      }
      scenario_.symmetric_connections.emplace(b.name, std::move(k));
    } else {
      throw ScenarioError("connection type must be plain, base, sigma, linear or symmetric", b.line, 1);
    }
  }

  void apply_lagrangian(const Block& b) {
    const auto& ch = chart(b.line);
    const Entry* l = nullptr;
    const Entry* f = nullptr;
    std::string through;
    for (const auto& e : b.entries) {
      if (e.key == "L")
        l = &e;
      else if (e.key == "F")
        f = &e;
      else if (e.key == "through")
        through = e.value;
      else
        throw ScenarioError("unknown lagrangian key '" + e.key + "'", e.line, e.key_col);
    }
    if ((l != nullptr) == (f != nullptr)) throw ScenarioError("give exactly one of L or F", b.line, 1);
    if (l) {
      scenario_.lagrangians.emplace(b.name, Lagrangian{expr_over(*l, ch.j1y_coords())});
      return;
    }
    auto it = scenario_.sigma_connections.find(through);
    if (it == scenario_.sigma_connections.end())
      throw ScenarioError("F needs 'through' naming a sigma connection declared earlier", b.line, 1);
    std::vector<std::string> slots = ch.y_coords();
    for (const auto& y : ch.fibre())
      for (const auto& x : ch.base()) slots.push_back(velocity_name(y, x));
    scenario_.lagrangians.emplace(b.name, factor_through(it->second, expr_over(*f, slots)));
  }

  void apply_tetrad(const Block& b) {
    const auto& ch = chart(b.line);
    if (ch.base().size() != 4) throw ScenarioError("tetrads need a four-dimensional base", b.line, 1);
    Tetrad t = Tetrad::identity(ch.base());
    const std::vector<std::string> frame = {"0", "1", "2", "3"};
    for (const auto& e : b.entries) {
      if (e.key != "h") throw ScenarioError("expected h[lambda,a] entries", e.line, e.key_col);
      require_arity(e, 2);
      t.h[resolve(e, 0, ch.base(), "world index")][resolve(e, 1, frame, "frame index")] = expr_over(e, ch.base());
    }
    scenario_.tetrads.emplace(b.name, std::move(t));
  }

  void apply_spin_connection(const Block& b) {
    chart(b.line);
    std::string k;
    for (const auto& e : b.entries) {
      if (e.key != "K") throw ScenarioError("expected K = <symmetric connection>", e.line, e.key_col);
      if (!scenario_.symmetric_connections.count(e.value))
        throw ScenarioError("unknown symmetric connection '" + e.value + "'", e.line, e.value_col);
      k = e.value;
    }
    scenario_.spin_connections.emplace(b.name, k);
  }

  void apply_spinor_jet(const Block& b) {
    const auto& ch = chart(b.line);
    if (ch.base().size() != 4) throw ScenarioError("spinor jets need a four-dimensional base", b.line, 1);
    SpinorJet j = symbolic_spinor_jet(ch.base());
    const std::vector<std::string> comps = {"0", "1", "2", "3"};
    for (const auto& e : b.entries) {
      CExpr v;
      try {
        v = parse_complex(e.value);
        require_symbols_in(v.re, ch.base());
        require_symbols_in(v.im, ch.base());
      } catch (const SyntaxError& err) {
        throw ScenarioError("syntax error: " + err.reason(), e.line, e.value_col + static_cast<int>(err.position()));
      } catch (const Error& err) {
        throw ScenarioError(err.what(), e.line, e.value_col);
      }
      if (e.key == "y") {
        require_arity(e, 1);
        j.y[resolve(e, 0, comps, "spinor index")] = v;
      } else if (e.key == "dy") {
        require_arity(e, 2);
        j.dy[resolve(e, 0, ch.base(), "world index")][resolve(e, 1, comps, "spinor index")] = v;
      } else {
        throw ScenarioError("expected y[A] or dy[lambda,A] entries", e.line, e.key_col);
      }
    }
    scenario_.spinor_jets.emplace(b.name, std::move(j));
  }

  // -- directive validation --------------------------------------------------

  template <class Map>
  void require_ref(const CheckDirective& c, const std::string& key, const Map& m, const std::string& what,
                   bool optional = false) const {
    auto it = c.args.find(key);
    if (it == c.args.end()) {
      if (optional) return;
      throw ScenarioError("check " + c.label + " needs " + key + "=<" + what + ">", c.line, 1);
    }
    if (!m.count(it->second))
      throw ScenarioError("check " + c.label + ": no " + what + " named '" + it->second + "'", c.line, 1);
  }

  void validate_check(const CheckDirective& c) const {
    const auto& s = scenario_;
    std::set<std::string> allowed;
    auto need = [&](const std::string& key, const auto& m, const std::string& what, bool optional = false) {
      allowed.insert(key);
      require_ref(c, key, m, what, optional);
    };
    const std::string& n = c.name;
    if (n == "splitting" || n == "char-form") {
      need("connection", s.sigma_connections, "sigma connection");
    } else if (n == "vcd-restriction") {
      need("connection", s.sigma_connections, "sigma connection");
      need("section", s.sections, "section");
    } else if (n == "composite-reduction") {
      need("connection", s.sigma_connections, "sigma connection");
      need("gamma", s.connections, "base connection");
      need("section", s.sections, "section");
    } else if (n == "rho-prolong") {
      need("section", s.sections, "section");
      need("fibre-section", s.sections, "section");
    } else if (n == "dual-pairing") {
      need("connection", s.linear_connections, "linear connection");
    } else if (n == "tensor-leibniz") {
      need("connection", s.linear_connections, "linear connection");
      need("other", s.linear_connections, "linear connection", true);
    } else if (n == "hamiltonian-lift") {
      need("connection", s.connections, "plain connection");
      need("k", s.symmetric_connections, "symmetric connection");
    } else if (n == "legendre-constraint") {
      need("lagrangian", s.lagrangians, "lagrangian");
      need("connection", s.sigma_connections, "sigma connection");
      allowed.insert("expect");
      const auto e = c.arg("expect", "factored");
      if (e != "factored" && e != "generic")
        throw ScenarioError("expect must be factored or generic", c.line, 1);
    } else if (n == "gamma-h-metric") {
      need("tetrad", s.tetrads, "tetrad");
    } else if (n == "total-dirac-restriction") {
      need("tetrad", s.tetrads, "tetrad");
      need("spin", s.spin_connections, "spin connection");
      need("spinor", s.spinor_jets, "spinor jet", true);
    }
    for (const auto& [k, v] : c.args)
      if (!allowed.count(k)) throw ScenarioError("check " + c.label + " does not take '" + k + "'", c.line, 1);
  }

  std::vector<Block> blocks_;
  std::set<std::string> names_;
  Scenario scenario_;
};

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) { return detail::ScenarioBuilder().build(text); }

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace jetcalc
