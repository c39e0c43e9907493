#include "featgts/init.hpp"

#include <charconv>
#include <cstdio>
#include <numeric>

#include "featgts/error.hpp"
#include "rng.hpp"

namespace featgts {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto end = s.find(sep, start);
    out.push_back(s.substr(start, end - start));
    if (end == std::string::npos) return out;
    start = end + 1;
  }
}

template <class T>
T number(const std::string& s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorKind::Runtime, std::string("init: bad ") + what + " '" + s + "'");
  return v;
}

std::string padded(char prefix, std::size_t i, std::size_t count) {
  const std::size_t width = count > 1 ? std::to_string(count - 1).size() : 1;
  std::string digits = std::to_string(i);
  return prefix + std::string(width - digits.size(), '0') + digits;
}

std::string fixed6(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

// RFC 4180 quoting, only when needed.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

InitSpec parse_init_spec(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() < 2 || parts.size() > 3)
    throw Error(ErrorKind::Runtime, "init: expected N,k[,p|ring-d] but got '" + text + "'");
  InitSpec s;
  s.population = number<std::size_t>(parts[0], "population");
  s.infected = number<std::size_t>(parts[1], "infected count");
  if (parts.size() == 3) {
    if (parts[2].rfind("ring-", 0) == 0) {
      s.network = InitSpec::Network::Ring;
      s.d = number<std::size_t>(parts[2].substr(5), "ring degree");
    } else {
      s.network = InitSpec::Network::Uniform;
      s.p = number<double>(parts[2], "link probability");
      if (!(s.p >= 0.0 && s.p <= 1.0)) throw Error(ErrorKind::Runtime, "init: link probability must lie in [0, 1]");
    }
  }
  if (s.infected > s.population) throw Error(ErrorKind::Runtime, "init: more infected agents than agents");
  return s;
}

InstanceGraph generate_init(const InitSpec& spec, const TypeGraph& tg) {
  const std::size_t n = spec.population;
  if (spec.infected > n) throw Error(ErrorKind::Runtime, "init: more infected agents than agents");
  if (!tg.has_node_type("Agent")) throw Error(ErrorKind::Runtime, "init: the type graph has no Agent type");
  const AttrDecl* s = tg.attr("Agent", "s");
  if (!s || !s->domain.contains(Value{std::string("S")}) || !s->domain.contains(Value{std::string("I")}))
    throw Error(ErrorKind::Runtime, "init: Agent.s must admit S and I");
  const AttrDecl* l = tg.attr("Agent", "l");
  if (l && l->domain.kind() != AttrDomain::Kind::Grid)
    throw Error(ErrorKind::Runtime, "init: Agent.l must be a grid attribute");
  int grid = 0;
  if (l) {
    grid = l->domain.grid_size();
    if (spec.grid && spec.grid != grid)
      throw Error(ErrorKind::Runtime, "init: grid size " + std::to_string(spec.grid) +
                                          " differs from the model's " + std::to_string(grid));
  } else if (spec.grid) {
    throw Error(ErrorKind::Runtime, "init: grid placement requested but Agent.l is not declared");
  }
  const EdgeType* link = tg.edge_type("link");
  if (spec.network != InitSpec::Network::None) {
    if (!link || link->source != "Agent" || link->target != "Agent")
      throw Error(ErrorKind::Runtime, "init: network requested but link : Agent -> Agent is not declared");
    if (spec.network == InitSpec::Network::Uniform && !(spec.p >= 0.0 && spec.p <= 1.0))
      throw Error(ErrorKind::Runtime, "init: link probability must lie in [0, 1]");
    if (spec.network == InitSpec::Network::Ring && (spec.d < 1 || spec.d >= n))
      throw Error(ErrorKind::Runtime, "init: ring degree must lie in 1..N-1");
  }
  for (const auto* d : tg.attrs_of("Agent"))
    if (d->name != "s" && d->name != "l")
      throw Error(ErrorKind::Runtime, "init: cannot initialise attribute Agent." + d->name);

  detail::Rng rng(spec.seed);
  // Partial Fisher-Yates: the first k positions are the infected agents.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<bool> infected(n, false);
  for (std::size_t i = 0; i < spec.infected; ++i) {
    std::swap(order[i], order[i + rng.below(n - i)]);
    infected[order[i]] = true;
  }

  InstanceGraph g;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(padded('a', i, n));
    std::map<std::string, Value> attrs{{"s", Value{std::string(infected[i] ? "I" : "S")}}};
    if (l) {
      const int x = static_cast<int>(rng.below(grid));
      const int y = static_cast<int>(rng.below(grid));
      attrs["l"] = Cell{x, y};
    }
    g.add_node(ids.back(), "Agent", std::move(attrs));
  }

  std::vector<std::pair<std::size_t, std::size_t>> links;
  if (spec.network == InitSpec::Network::Uniform) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform() < spec.p) {
          if (rng.uniform() < 0.5) links.emplace_back(i, j);
          else links.emplace_back(j, i);
        }
  } else if (spec.network == InitSpec::Network::Ring) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 1; j <= spec.d; ++j) links.emplace_back(i, (i + j) % n);
  }
  for (std::size_t e = 0; e < links.size(); ++e)
    g.add_edge(padded('e', e, links.size()), "link", ids[links[e].first], ids[links[e].second]);
  return g;
}

void write_events_csv(std::ostream& os, const std::vector<Trajectory>& runs) {
  os << "run,time,rule,nodes\r\n";
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (const auto& ev : runs[r].events) {
      std::string nodes;
      for (std::size_t i = 0; i < ev.nodes.size(); ++i) nodes += (i ? ";" : "") + ev.nodes[i];
      os << r << ',' << fixed6(ev.time) << ',' << field(ev.rule) << ',' << field(nodes) << "\r\n";
    }
}

void write_observables_csv(std::ostream& os, const std::vector<Trajectory>& runs, const std::string& node_type,
                           const std::string& attr) {
  if (runs.empty()) throw Error(ErrorKind::Runtime, "no runs to observe");
  const AttrDecl* decl = runs.front().system->types.attr(node_type, attr);
  if (!decl) throw Error(ErrorKind::Runtime, "attribute '" + node_type + "." + attr + "' is not declared");
  os << "run,time";
  for (const auto& v : decl->domain.values()) os << ',' << field(to_string(v));
  os << "\r\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    auto series = observe_all(runs[r], node_type, attr);
    for (std::size_t k = 0; k < series.front().times.size(); ++k) {
      os << r << ',' << fixed6(series.front().times[k]);
      for (const auto& s : series) os << ',' << s.values[k];
      os << "\r\n";
    }
  }
}

}  // namespace featgts
