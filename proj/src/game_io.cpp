#include "efgce/game_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace efgce {
namespace {

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) fail_at(line, "malformed number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail_at(line, "malformed number '" + s + "'");
  } catch (const std::out_of_range&) {
    fail_at(line, "number out of range '" + s + "'");
  }
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail_at(line, "malformed integer '" + s + "'");
  return v;
}

// field of the form key=value
std::string expect_field(const std::vector<std::string>& tok, size_t i, const std::string& key,
                         int line) {
  if (i >= tok.size() || tok[i].rfind(key + "=", 0) != 0)
    fail_at(line, "expected field '" + key + "='");
  return tok[i].substr(key.size() + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RawGame parse_game(std::istream& in) {
  RawGame raw;
  std::map<int, int> id_map;  // external id -> dense index, in record order
  std::vector<std::vector<int>> ext_children;
  std::vector<int> def_line;
  std::string lineb;
  int line = 0;
  bool have_player = false;

  while (std::getline(in, lineb)) {
    ++line;
    if (!lineb.empty() && lineb.back() == '\r') lineb.pop_back();
    if (lineb.empty()) continue;
    std::vector<std::string> tok;
    {
      std::istringstream ls(lineb);
      std::string t;
      while (ls >> t) tok.push_back(t);
    }
    if (tok[0] == "player") {
      if (have_player) fail_at(line, "duplicate player record");
      if (tok.size() != 2) fail_at(line, "player record takes one count");
      raw.num_players = parse_int(tok[1], line);
      if (raw.num_players < 1) fail_at(line, "player count must be positive");
      have_player = true;
      continue;
    }
    if (!have_player) fail_at(line, "first record must be 'player <n>'");
    if (tok.size() < 2) fail_at(line, "record is missing a node id");
    int ext = parse_int(tok[1], line);
    if (!id_map.try_emplace(ext, static_cast<int>(raw.nodes.size())).second)
      fail_at(line, "node " + std::to_string(ext) + " defined twice");

    RawGame::Node n;
    std::vector<int> kids;
    if (tok[0] == "node") {
      n.kind = RawGame::Kind::decision;
      n.player = parse_int(expect_field(tok, 2, "player", line), line);
      n.infoset = expect_field(tok, 3, "infoset", line);
      for (const std::string& a : split(expect_field(tok, 4, "actions", line), ','))
        n.actions.push_back(a);
      for (const std::string& c : split(expect_field(tok, 5, "children", line), ','))
        kids.push_back(parse_int(c, line));
      if (n.actions.empty() || n.actions.size() != kids.size())
        fail_at(line, "node " + std::to_string(ext) + " has mismatched actions/children");
    } else if (tok[0] == "chance") {
      n.kind = RawGame::Kind::chance;
      for (const std::string& s : split(expect_field(tok, 2, "probs", line), ','))
        n.probs.push_back(parse_double(s, line));
      for (const std::string& c : split(expect_field(tok, 3, "children", line), ','))
        kids.push_back(parse_int(c, line));
      if (n.probs.empty() || n.probs.size() != kids.size())
        fail_at(line, "chance node " + std::to_string(ext) + " has mismatched probs/children");
      double sum = 0;
      for (double p : n.probs) sum += p;
      if (std::abs(sum - 1.0) > 1e-12)
        fail_at(line, "chance probabilities at node " + std::to_string(ext) + " sum to " +
                          std::to_string(sum));
    } else if (tok[0] == "leaf") {
      n.kind = RawGame::Kind::terminal;
      for (const std::string& s : split(expect_field(tok, 2, "payoffs", line), ','))
        n.payoffs.push_back(parse_double(s, line));
      if (static_cast<int>(n.payoffs.size()) != raw.num_players)
        fail_at(line, "leaf " + std::to_string(ext) + " must list one payoff per player");
    } else {
      fail_at(line, "unknown record '" + tok[0] + "'");
    }
    raw.nodes.push_back(std::move(n));
    ext_children.push_back(std::move(kids));
    def_line.push_back(line);
  }
  if (raw.nodes.empty()) throw std::runtime_error("game file has no nodes");
  for (size_t i = 0; i < raw.nodes.size(); ++i)
    for (int ext : ext_children[i]) {
      auto it = id_map.find(ext);
      if (it == id_map.end())
        fail_at(def_line[i], "child node " + std::to_string(ext) + " is never defined");
      raw.nodes[i].children.push_back(it->second);
    }
  return raw;
}

RawGame parse_game_string(const std::string& text) {
  std::istringstream in(text);
  return parse_game(in);
}

RawGame load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  return parse_game(in);
}

std::string serialize_game(const RawGame& raw) {
  std::string out = "player " + std::to_string(raw.num_players) + "\n";
  for (size_t id = 0; id < raw.nodes.size(); ++id) {
    const RawGame::Node& n = raw.nodes[id];
    switch (n.kind) {
      case RawGame::Kind::decision: {
        out += "node " + std::to_string(id) + " player=" + std::to_string(n.player) +
               " infoset=" + n.infoset + " actions=";
        for (size_t a = 0; a < n.actions.size(); ++a)
          out += (a ? "," : "") + n.actions[a];
        out += " children=";
        for (size_t c = 0; c < n.children.size(); ++c)
          out += (c ? "," : "") + std::to_string(n.children[c]);
        break;
      }
      case RawGame::Kind::chance: {
        out += "chance " + std::to_string(id) + " probs=";
        for (size_t p = 0; p < n.probs.size(); ++p) out += (p ? "," : "") + fmt(n.probs[p]);
        out += " children=";
        for (size_t c = 0; c < n.children.size(); ++c)
          out += (c ? "," : "") + std::to_string(n.children[c]);
        break;
      }
      case RawGame::Kind::terminal: {
        out += "leaf " + std::to_string(id) + " payoffs=";
        for (size_t p = 0; p < n.payoffs.size(); ++p) out += (p ? "," : "") + fmt(n.payoffs[p]);
        break;
      }
    }
    out += "\n";
  }
  return out;
}

void save_game_file(const Game& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write game file '" + path + "'");
  out << serialize_game(g);
}

}  // namespace efgce
