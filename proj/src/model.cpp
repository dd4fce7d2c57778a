#include "srn/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "srn/errors.hpp"

namespace srn {

namespace {

class Cursor {
 public:
  Cursor(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  void expect_end() {
    if (!done()) fail("unexpected trailing text '" + std::string(s_.substr(pos_)) + "'");
  }

  bool at_identifier() {
    const char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string identifier() {
    if (!at_identifier()) fail("expected a name");
    const std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }

  bool at_number() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }
  // Unsigned decimal literal; returns the value and its exact spelling.
  std::pair<double, std::string> number() {
    skip_ws();
    const std::size_t b = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == s_.data() + pos_ || s_[pos_] == '-' || s_[pos_] == '+') fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return {v, std::string(s_.substr(b, pos_ - b))};
  }
  std::int64_t integer() {
    skip_ws();
    const bool neg = pos_ < s_.size() && s_[pos_] == '-';
    if (neg || (pos_ < s_.size() && s_[pos_] == '+')) ++pos_;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == s_.data() + pos_) fail("expected an integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return neg ? -v : v;
  }
  std::string rest() {
    skip_ws();
    std::string r(s_.substr(pos_));
    pos_ = s_.size();
    while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back()))) r.pop_back();
    return r;
  }
  std::size_t position() const { return pos_; }
  std::string_view text() const { return s_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, static_cast<int>(pos_) + 1, what);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

struct Context {
  std::vector<std::string> species;
  State x0;

  int index(Cursor& c, const std::string& name) const {
    auto it = std::find(species.begin(), species.end(), name);
    if (it == species.end()) c.fail("unknown species '" + name + "'");
    return static_cast<int>(it - species.begin());
  }
};

std::vector<std::pair<int, int>> parse_side(Cursor& c, const Context& ctx) {
  std::map<int, int> counts;
  if (c.peek() == '0' || c.accept("\xe2\x88\x85")) {  // "0" or the empty-set sign
    if (c.peek() == '0') c.integer();
    return {};
  }
  do {
    int k = 1;
    if (c.at_number()) k = static_cast<int>(c.integer());
    if (k <= 0) c.fail("stoichiometric coefficient must be positive");
    counts[ctx.index(c, c.identifier())] += k;
  } while (c.accept('+'));
  return {counts.begin(), counts.end()};
}

// term := [number ['*']] factor ('*' factor)* | number ; factor := name ['^' int]
Polynomial parse_polynomial(Cursor& c, const Context& ctx, bool linear) {
  std::vector<Monomial> terms;
  double sign = 1.0;
  if (c.accept('-')) sign = -1.0;
  else c.accept('+');
  for (;;) {
    Monomial m;
    m.coef = sign;
    bool need_factor = true;
    if (c.at_number()) {
      m.coef *= c.number().first;
      need_factor = c.accept('*');
    }
    if (need_factor || c.at_identifier()) {
      std::map<int, int> powers;
      do {
        const int i = ctx.index(c, c.identifier());
        int p = 1;
        if (c.accept('^')) p = static_cast<int>(c.integer());
        if (p < 0) c.fail("negative power");
        powers[i] += p;
      } while (c.accept('*'));
      m.factors.assign(powers.begin(), powers.end());
      if (linear && (m.factors.size() > 1 || m.factors.front().second > 1)) c.fail("observable must be linear");
    }
    terms.push_back(std::move(m));
    if (c.accept('+')) sign = 1.0;
    else if (c.accept('-')) sign = -1.0;
    else break;
  }
  return Polynomial(std::move(terms));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_side(const std::vector<std::pair<int, int>>& side, const std::vector<std::string>& names) {
  if (side.empty()) return "0";
  std::string out;
  for (auto [i, k] : side) {
    if (!out.empty()) out += " + ";
    if (k != 1) out += std::to_string(k);
    out += names[i];
  }
  return out;
}

}  // namespace

Model parse_model(const std::string& text) {
  Model model;
  Context ctx;
  std::vector<std::pair<int, std::string>> deferred;
  bool have_T = false, have_g = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    Cursor c(raw, line_no);
    if (c.done()) continue;
    if (c.accept("species") && !c.at_number() && c.peek() != '=') {
      const std::string name = c.identifier();
      if (std::find(ctx.species.begin(), ctx.species.end(), name) != ctx.species.end())
        c.fail("species '" + name + "' declared twice");
      c.expect('=');
      const std::int64_t n = c.integer();
      if (n < 0) c.fail("initial count must be nonnegative");
      c.expect_end();
      ctx.species.push_back(name);
      ctx.x0.push_back(n);
    } else {
      deferred.emplace_back(line_no, raw);
    }
  }
  if (ctx.species.empty()) throw ParseError(line_no, 1, "model declares no species");

  std::vector<Reaction> reactions;
  for (auto& [ln, raw] : deferred) {
    Cursor c(raw, ln);
    if (c.accept("reaction")) {
      Reaction r;
      // Optional "label:" prefix.
      if (c.at_identifier()) {
        Cursor probe = c;
        const std::string id = probe.identifier();
        if (probe.accept(':')) {
          r.label = id;
          c = probe;
        }
      }
      if (r.label.empty()) r.label = "r" + std::to_string(reactions.size() + 1);
      r.nu.assign(ctx.species.size(), 0);
      Cursor probe = c;
      if (probe.at_identifier() && probe.identifier() == "nu" && probe.accept('=')) {
        c = probe;
        r.mass_action = false;
        c.expect('(');
        for (std::size_t i = 0; i < ctx.species.size(); ++i) {
          if (i > 0) c.expect(',');
          r.nu[i] = static_cast<int>(c.integer());
        }
        c.expect(')');
        c.expect('@');
        const std::size_t b = c.position();
        Cursor poly_cursor = c;
        r.propensity = parse_polynomial(poly_cursor, ctx, false);
        poly_cursor.expect_end();
        r.rate_text = std::string(c.text().substr(b));
        r.rate_text.erase(0, r.rate_text.find_first_not_of(" \t"));
        while (!r.rate_text.empty() && std::isspace(static_cast<unsigned char>(r.rate_text.back())))
          r.rate_text.pop_back();
      } else {
        r.reactants = parse_side(c, ctx);
        if (!c.accept("->")) c.fail("expected '->'");
        r.products = parse_side(c, ctx);
        c.expect('@');
        auto [rate, spelling] = c.number();
        c.expect_end();
        if (rate < 0.0) c.fail("rate must be nonnegative");
        r.rate_text = spelling;
        for (auto [i, k] : r.reactants) r.nu[i] -= k;
        for (auto [i, k] : r.products) r.nu[i] += k;
        if (std::all_of(r.nu.begin(), r.nu.end(), [](int v) { return v == 0; }))
          c.fail("reaction has zero net stoichiometry");
        r.propensity = Polynomial::mass_action(rate, r.reactants);
      }
      reactions.push_back(std::move(r));
      continue;
    }
    const std::string key = c.identifier();
    c.expect('=');
    if (key == "name") {
      model.name = c.rest();
    } else if (key == "T") {
      model.T = c.number().first;
      c.expect_end();
      if (!(model.T > 0.0)) c.fail("T must be positive");
      have_T = true;
    } else if (key == "observable") {
      const std::size_t b = c.position();
      Cursor poly_cursor = c;
      Polynomial p = parse_polynomial(poly_cursor, ctx, true);
      poly_cursor.expect_end();
      model.g.weights.assign(ctx.species.size(), 0.0);
      for (const auto& m : p.terms()) {
        if (m.factors.empty()) model.g.offset += m.coef;
        else model.g.weights[m.factors.front().first] += m.coef;
      }
      model.g.text = std::string(c.text().substr(b));
      model.g.text.erase(0, model.g.text.find_first_not_of(" \t"));
      while (!model.g.text.empty() && std::isspace(static_cast<unsigned char>(model.g.text.back())))
        model.g.text.pop_back();
      have_g = true;
    } else {
      Cursor(raw, ln).fail("unknown key '" + key + "'");
    }
  }
  if (reactions.empty()) throw ParseError(line_no, 1, "model declares no reactions");
  if (!have_T) throw ParseError(line_no, 1, "missing 'T = <final time>'");
  if (!have_g) throw ParseError(line_no, 1, "missing 'observable = <linear form>'");
  model.net = ReactionNetwork(ctx.species, std::move(reactions));
  model.x0 = std::move(ctx.x0);
  return model;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string write_model(const Model& model) {
  const auto& names = model.net.species_names();
  std::ostringstream out;
  if (!model.name.empty()) out << "name = " << model.name << "\n";
  out << "T = " << format_double(model.T) << "\n";
  for (std::size_t i = 0; i < names.size(); ++i) out << "species " << names[i] << " = " << model.x0[i] << "\n";
  for (const auto& r : model.net.reaction_list()) {
    out << "reaction " << r.label << ": ";
    if (r.mass_action) {
      out << format_side(r.reactants, names) << " -> " << format_side(r.products, names);
    } else {
      out << "nu = (";
      for (std::size_t i = 0; i < r.nu.size(); ++i) out << (i ? "," : "") << r.nu[i];
      out << ")";
    }
    out << " @ " << r.rate_text << "\n";
  }
  out << "observable = " << model.g.text << "\n";
  return out.str();
}

std::string model_hash(const Model& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : write_model(model)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Feasibility of {w >= 0, sum w = 1, N w <= 0} by phase-one simplex with Bland's rule.
bool simplex_feasible(const ReactionNetwork& net) {
  const std::size_t d = net.species(), J = net.reactions();
  const std::size_t rows = J + 1, cols = d + J + rows;  // w, slacks, artificials
  std::vector<std::vector<double>> tab(rows + 1, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(rows);
  for (std::size_t j = 0; j < J; ++j) {
    const auto v = net.nu(j);
    for (std::size_t i = 0; i < d; ++i) tab[j][i] = v[i];
    tab[j][d + j] = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i) tab[J][i] = 1.0;
  tab[J][cols] = 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    tab[r][d + J + r] = 1.0;
    basis[r] = d + J + r;
  }
  for (std::size_t c = 0; c <= cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) tab[rows][c] -= tab[r][c];
  for (std::size_t r = 0; r < rows; ++r) tab[rows][d + J + r] = 0.0;

  for (int iter = 0; iter < 1000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t c = 0; c < cols; ++c)
      if (tab[rows][c] < -1e-12) {
        enter = c;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = rows;
    double best = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] <= 1e-12) continue;
      const double ratio = tab[r][cols] / tab[r][enter];
      if (leave == rows || ratio < best - 1e-12 || (std::fabs(ratio - best) <= 1e-12 && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == rows) break;
    const double piv = tab[leave][enter];
    for (auto& v : tab[leave]) v /= piv;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave || tab[r][enter] == 0.0) continue;
      const double f = tab[r][enter];
      for (std::size_t c = 0; c <= cols; ++c) tab[r][c] -= f * tab[leave][c];
    }
    basis[leave] = enter;
  }
  return -tab[rows][cols] < 1e-9;
}

}  // namespace

std::vector<LintMessage> lint_model(const Model& model, bool check_simplex) {
  std::vector<LintMessage> out;
  const auto& net = model.net;
  const std::size_t d = net.species(), J = net.reactions();

  for (std::size_t i = 0; i < d; ++i) {
    bool used = model.g.weights[i] != 0.0;
    for (std::size_t j = 0; j < J; ++j) used = used || net.nu(j)[i] != 0;
    if (!used) out.push_back({false, "species '" + net.species_names()[i] + "' never changes and is not observed"});
  }
  for (std::size_t j = 0; j < J; ++j)
    if (net.reaction_list()[j].propensity.terms().empty())
      out.push_back({false, "reaction '" + net.reaction_list()[j].label + "' has an identically zero propensity"});

  // Propensities must be nonnegative on lattice points near the origin and near x0.
  std::vector<double> a(J);
  State x(d, 0);
  const std::size_t corners = std::size_t{1} << std::min<std::size_t>(d, 12);
  bool negative = false;
  for (std::int64_t shift = 0; shift < 4 && !negative; ++shift) {
    for (std::size_t mask = 0; mask < corners && !negative; ++mask) {
      for (std::size_t i = 0; i < d; ++i) x[i] = ((mask >> i) & 1) ? model.x0[i] + shift : shift;
      try {
        net.propensities(x, a);
      } catch (const ModelError& e) {
        out.push_back({true, std::string(e.what()) + " at a sampled lattice point"});
        negative = true;
      }
    }
  }

  std::vector<double> x0(model.x0.begin(), model.x0.end());
  try {
    mean_field(net, x0, model.T, model.T / 1e4);
  } catch (const ModelError& e) {
    out.push_back({true, e.what()});
  }

  if (check_simplex && !simplex_feasible(net))
    out.push_back({false, "no w >= 0, w != 0 with (w, nu_j) <= 0 for every reaction (state space may be unbounded)"});
  return out;
}

Model decay_model(double x0, double c, double T) {
  std::ostringstream s;
  s << "name = decay\nT = " << format_double(T) << "\nspecies X = " << static_cast<std::int64_t>(x0)
    << "\nreaction death: X -> 0 @ " << format_double(c) << "\nobservable = X\n";
  return parse_model(s.str());
}

Model gene_model() {
  return parse_model(
      "name = gene\n"
      "T = 1\n"
      "species R = 0\n"
      "species P = 0\n"
      "species D = 0\n"
      "reaction transcription: 0 -> R @ 25\n"
      "reaction translation: R -> R + P @ 1e3\n"
      "reaction dimerization: 2P -> D @ 0.001\n"
      "reaction mrna_decay: R -> 0 @ 0.1\n"
      "reaction protein_decay: P -> 0 @ 1\n"
      "observable = D\n");
}

}  // namespace srn
