#include "fiberscope/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fiberscope/errors.hpp"
#include "fiberscope/random.hpp"

namespace fiberscope {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (!text.empty() && text.front() == '+') ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string join_ints(const std::vector<int>& values, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"lattice", {"d", "c", "N"}},
      {"grid", {"S", "K", "M", "L"}},
      {"gamma", {"a", "b", "pairs"}},
      {"generators", {"gen"}},
      {"tolerances", {"rank", "member", "supp", "measure_slack", "plancherel", "intertwining"}},
      {"run", {"analyses", "seed", "out", "dumps"}},
      {"beta", {"phi", "target"}},
  };
  return keys;
}

const std::set<std::string>& generator_kinds() {
  static const std::set<std::string> kinds{"random", "residue", "rank-one", "zero", "fiber-file", "sampled-file"};
  return kinds;
}

class Parser {
 public:
  explicit Parser(RunConfig& config) : cfg_(config) {}

  void line(std::size_t number, std::string raw) {
    number_ = number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) return;

    if (text.front() == '[') {
      if (text.back() != ']') return fail("malformed section header '" + text + "'");
      section_ = trim(text.substr(1, text.size() - 2));
      if (!known_keys().count(section_)) {
        fail("unknown section [" + section_ + "]");
        section_.clear();
        bad_section_ = true;
      } else {
        bad_section_ = false;
      }
      return;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) return fail("expected 'key = value', got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (bad_section_) return;
    if (section_.empty()) return fail("key '" + key + "' appears before any [section]");
    if (!known_keys().at(section_).count(key)) return fail("unknown key '" + key + "' in [" + section_ + "]");
    if (key != "gen" && !seen_.insert(section_ + "." + key).second)
      return fail("duplicate key '" + key + "' in [" + section_ + "]");
    assign(key, value);
  }

  std::vector<std::string> errors;

 private:
  void fail(const std::string& message) { errors.push_back("line " + std::to_string(number_) + ": " + message); }

  template <typename T>
  void number(const std::string& key, const std::string& value, T& out) {
    if (!parse_number(value, out))
      fail(key + ": expected " + (std::is_floating_point_v<T> ? "a number" : "an integer") + ", got '" + value + "'");
  }

  void assign(const std::string& key, const std::string& value) {
    if (section_ == "lattice") {
      if (key == "d") number(key, value, cfg_.d);
      if (key == "c") number(key, value, cfg_.c);
      if (key == "N") number(key, value, cfg_.N);
    } else if (section_ == "grid") {
      if (key == "S") number(key, value, cfg_.S);
      if (key == "K") number(key, value, cfg_.K);
      if (key == "M") number(key, value, cfg_.M);
      if (key == "L") number(key, value, cfg_.L);
    } else if (section_ == "gamma") {
      if (key == "a") number(key, value, cfg_.a);
      if (key == "b") number(key, value, cfg_.b);
      if (key == "pairs") pairs(value);
    } else if (section_ == "generators") {
      generator(value);
    } else if (section_ == "tolerances") {
      if (key == "rank") number(key, value, cfg_.tol.rank);
      if (key == "member") number(key, value, cfg_.tol.member);
      if (key == "supp") number(key, value, cfg_.tol.supp);
      if (key == "measure_slack") number(key, value, cfg_.tol.measure_slack);
      if (key == "plancherel") number(key, value, cfg_.plancherel_tol);
      if (key == "intertwining") number(key, value, cfg_.intertwining_tol);
    } else if (section_ == "run") {
      if (key == "analyses") cfg_.analyses = split(value, ',');
      if (key == "seed") number(key, value, cfg_.seed);
      if (key == "out") cfg_.out = value;
      if (key == "dumps") {
        if (value == "true") cfg_.dumps = true;
        else if (value == "false") cfg_.dumps = false;
        else fail("dumps: expected true or false, got '" + value + "'");
      }
    } else if (section_ == "beta") {
      if (key == "phi") number(key, value, cfg_.beta_phi);
      if (key == "target") cfg_.beta_target = value;
    }
  }

  bool int_list(const std::string& what, const std::string& text, std::vector<int>& out) {
    out.clear();
    for (const auto& item : split(text, ',')) {
      int v = 0;
      if (!parse_number(item, v)) {
        fail(what + ": expected integers, got '" + text + "'");
        return false;
      }
      out.push_back(v);
    }
    return true;
  }

  void pairs(const std::string& value) {
    cfg_.pairs.clear();
    for (const auto& token : split_ws(value)) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) return fail("pairs: expected m:n, got '" + token + "'");
      GammaSet::IndexPair p;
      if (!int_list("pairs", token.substr(0, colon), p.first) || !int_list("pairs", token.substr(colon + 1), p.second))
        return;
      cfg_.pairs.push_back(std::move(p));
    }
  }

  void generator(const std::string& value) {
    const auto tokens = split_ws(value);
    if (tokens.empty()) return fail("gen: missing generator kind");
    GeneratorSpec g;
    g.kind = tokens.front();
    if (!generator_kinds().count(g.kind)) return fail("gen: unknown kind '" + g.kind + "'");
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string::npos) return fail("gen: expected key=value, got '" + tokens[i] + "'");
      const std::string k = tokens[i].substr(0, eq);
      const std::string v = tokens[i].substr(eq + 1);
      if (k == "seed") {
        std::uint64_t s = 0;
        if (!parse_number(v, s)) return fail("gen: seed must be an unsigned integer, got '" + v + "'");
        g.seed = s;
      } else if (k == "residues" && (g.kind == "random" || g.kind == "rank-one")) {
        if (!int_list("gen residues", v, g.residues)) return;
      } else if (k == "residue" && g.kind == "residue") {
        if (!parse_number(v, g.residue)) return fail("gen: residue must be an integer, got '" + v + "'");
      } else if (k == "path" && (g.kind == "fiber-file" || g.kind == "sampled-file")) {
        g.path = v;
      } else {
        return fail("gen: key '" + k + "' does not apply to kind '" + g.kind + "'");
      }
    }
    cfg_.generators.push_back(std::move(g));
  }

  RunConfig& cfg_;
  std::size_t number_ = 0;
  std::string section_;
  bool bad_section_ = false;
  std::set<std::string> seen_;
};

bool is_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

std::uint64_t RunConfig::generator_seed(std::size_t index) const {
  const auto& g = generators.at(index);
  return g.seed ? *g.seed : derive_seed(seed, index);
}

bool RunConfig::requested(const std::string& analysis) const {
  return std::find(analyses.begin(), analyses.end(), analysis) != analyses.end();
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  if (d < 1) out.push_back("d must be at least 1");
  if (!(c > 0.0 && std::isfinite(c))) out.push_back("c must be positive");
  if (N < 1) out.push_back("N must be at least 1");
  if (S < 1) out.push_back("S must be at least 1");
  if (K < 1) out.push_back("K must be at least 1");
  if (M < 1) out.push_back("M must be at least 1");
  if (!(L > 0.0 && std::isfinite(L))) out.push_back("L must be positive");
  if (d >= 1 && M >= 1 && std::pow(static_cast<double>(M), d) > 4096.0)
    out.push_back("block dimension M^d exceeds 4096");

  if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
    out.push_back("a and b must be positive");
  } else {
    if (!is_integer(a * b)) out.push_back("a*b not integer");
    if (M >= 1 && L > 0.0 && !is_integer(a / (L / static_cast<double>(M))))
      out.push_back("a must be a multiple of the grid step L/M");
  }
  bool has_identity = false;
  bool dims_ok = true;
  for (const auto& [m, n] : pairs) {
    dims_ok = dims_ok && static_cast<int>(m.size()) == d && static_cast<int>(n.size()) == d;
    has_identity = has_identity || (std::all_of(m.begin(), m.end(), [](int v) { return v == 0; }) &&
                                    std::all_of(n.begin(), n.end(), [](int v) { return v == 0; }));
  }
  if (!dims_ok) out.push_back("every gamma pair needs d components on each side");
  if (!has_identity)
    out.push_back("gamma pairs must contain the identity pair (0,0); the residue decomposition assumes e in Gamma");

  if (!(tol.rank > 0.0 && tol.member > 0.0 && tol.supp > 0.0 && tol.measure_slack > 0.0 && plancherel_tol > 0.0 &&
        intertwining_tol > 0.0))
    out.push_back("all tolerances must be positive");

  std::set<std::string> seen;
  for (const auto& name : analyses) {
    if (std::find(analysis_order().begin(), analysis_order().end(), name) == analysis_order().end())
      out.push_back("unknown analysis '" + name + "'");
    else if (!seen.insert(name).second)
      out.push_back("analysis '" + name + "' listed twice");
  }

  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    const std::string where = "generator " + std::to_string(i) + ": ";
    if (!generator_kinds().count(g.kind)) out.push_back(where + "unknown kind '" + g.kind + "'");
    if (g.kind == "residue" && (g.residue < 0 || g.residue >= N))
      out.push_back(where + "residue " + std::to_string(g.residue) + " outside 0..N-1");
    for (const int r : g.residues)
      if (r < 0 || r >= N) out.push_back(where + "residue " + std::to_string(r) + " outside 0..N-1");
    if ((g.kind == "fiber-file" || g.kind == "sampled-file") && g.path.empty()) out.push_back(where + "path required");
    if (g.kind == "sampled-file" && d != 1) out.push_back(where + "sampled functions need d = 1");
  }

  if (requested("beta") && !generators.empty()) {
    if (beta_phi >= generators.size()) out.push_back("beta: phi must index a generator");
    if (beta_target != "planted") {
      std::size_t t = 0;
      if (!parse_number(beta_target, t) || t >= generators.size())
        out.push_back("beta: target must be 'planted' or a generator index");
    }
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  Parser parser(config);
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    parser.line(number, raw);
  }
  std::vector<std::string> errors = std::move(parser.errors);
  if (errors.empty()) {
    const auto more = config.problems();
    errors.insert(errors.end(), more.begin(), more.end());
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string render(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[lattice]\n"
      << "d = " << cfg.d << "\n"
      << "c = " << format_double(cfg.c) << "\n"
      << "N = " << cfg.N << "\n\n";
  out << "[grid]\n"
      << "S = " << cfg.S << "\n"
      << "K = " << cfg.K << "\n"
      << "M = " << cfg.M << "\n"
      << "L = " << format_double(cfg.L) << "\n\n";
  out << "[gamma]\n"
      << "a = " << format_double(cfg.a) << "\n"
      << "b = " << format_double(cfg.b) << "\n"
      << "pairs =";
  for (const auto& [m, n] : cfg.pairs) out << ' ' << join_ints(m, ",") << ':' << join_ints(n, ",");
  out << "\n\n[generators]\n";
  for (const auto& g : cfg.generators) {
    out << "gen = " << g.kind;
    if (g.seed) out << " seed=" << *g.seed;
    if (!g.residues.empty()) out << " residues=" << join_ints(g.residues, ",");
    if (g.kind == "residue") out << " residue=" << g.residue;
    if (!g.path.empty()) out << " path=" << g.path;
    out << "\n";
  }
  out << "\n[tolerances]\n"
      << "rank = " << format_double(cfg.tol.rank) << "\n"
      << "member = " << format_double(cfg.tol.member) << "\n"
      << "supp = " << format_double(cfg.tol.supp) << "\n"
      << "measure_slack = " << format_double(cfg.tol.measure_slack) << "\n"
      << "plancherel = " << format_double(cfg.plancherel_tol) << "\n"
      << "intertwining = " << format_double(cfg.intertwining_tol) << "\n\n";
  out << "[run]\n" << "analyses = ";
  for (std::size_t i = 0; i < cfg.analyses.size(); ++i) out << (i ? ", " : "") << cfg.analyses[i];
  out << "\n"
      << "seed = " << cfg.seed << "\n"
      << "out = " << cfg.out << "\n"
      << "dumps = " << (cfg.dumps ? "true" : "false") << "\n\n";
  out << "[beta]\n"
      << "phi = " << cfg.beta_phi << "\n"
      << "target = " << cfg.beta_target << "\n";
  return out.str();
}

}  // namespace fiberscope
