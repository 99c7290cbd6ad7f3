#include "drlab/core/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace drlab {

std::string format_double(double value) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

namespace {

bool token_safe(const std::string& name) {
  if (name.empty() || name == "~" || name == ",") return false;
  for (char ch : name) {
    if (ch == ' ' || ch == '\t' || ch == '#' || ch == ':') return false;
  }
  return true;
}

void require_safe_names(const DrmdpSpec& spec) {
  for (const auto& s : spec.state_names) {
    if (!token_safe(s)) throw std::invalid_argument("state name '" + s + "' is not serializable");
  }
  for (const auto& actions : spec.action_names) {
    for (const auto& a : actions) {
      if (!token_safe(a)) throw std::invalid_argument("action name '" + a + "' is not serializable");
    }
  }
}

struct Line {
  int number;
  std::string text;
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::invalid_argument("spec parse: line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& token, int line) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') parse_fail(line, "bad number '" + token + "'");
  return v;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

std::string save_spec(const DrmdpSpec& spec) {
  require_safe_names(spec);
  std::ostringstream out;
  out << "drmdp-spec v1\n";

  out << "[states]\n";
  for (const auto& s : spec.state_names) out << s << '\n';

  out << "[actions]\n";
  for (std::size_t s = 0; s < spec.state_names.size(); ++s) {
    out << spec.state_names[s] << ':';
    for (const auto& a : spec.action_names[s]) out << ' ' << a;
    out << '\n';
  }

  out << "[transition]\n";
  for (std::size_t s = 0; s < spec.transition.size(); ++s) {
    for (std::size_t a = 0; a < spec.transition[s].size(); ++a) {
      for (const auto& [next, p] : spec.transition[s][a]) {
        out << spec.state_names[s] << ' ' << spec.action_names[s][a] << ' '
            << spec.state_names[next] << ' ' << format_double(p) << '\n';
      }
    }
  }

  out << "[initial]\n";
  for (const auto& [s, p] : spec.initial_dist) {
    out << spec.state_names[s] << ' ' << format_double(p) << '\n';
  }

  out << "[interval]\n";
  for (std::size_t i = 0; i < spec.interval_law.support().size(); ++i) {
    out << spec.interval_law.support()[i] << ' '
        << format_double(spec.interval_law.probs()[i]) << '\n';
  }

  out << "[gamma]\n" << format_double(spec.gamma) << '\n';
  out << "[overlap]\n" << spec.overlap_c << '\n';

  out << "[reward]\n";
  out << "kind " << reward_kind_name(spec.reward.kind) << '\n';
  for (std::size_t s = 0; s < spec.reward.step_reward.size(); ++s) {
    for (std::size_t a = 0; a < spec.reward.step_reward[s].size(); ++a) {
      if (spec.reward.step_reward[s][a] != 0.0) {
        out << "step " << spec.state_names[s] << ' ' << spec.action_names[s][a] << ' '
            << format_double(spec.reward.step_reward[s][a]) << '\n';
      }
    }
  }
  if (!spec.reward.weights.empty()) {
    out << "weights";
    for (double w : spec.reward.weights) out << ' ' << format_double(w);
    out << '\n';
  }
  for (const auto& [steps, value] : spec.reward.table) {
    out << "entry ";
    for (std::size_t j = 0; j < steps.size(); ++j) {
      if (j > 0) out << " , ";
      if (steps[j].is_padding()) {
        out << '~';
      } else {
        out << spec.state_names[steps[j].state] << ' '
            << spec.action_names[steps[j].state][steps[j].action];
      }
    }
    out << " -> " << format_double(value) << '\n';
  }
  return out.str();
}

DrmdpSpec parse_spec(const std::string& text) {
  // Pass 1: split into sections, stripping comments and blank lines.
  std::map<std::string, std::vector<Line>> sections;
  {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool saw_magic = false;
    std::string current;
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
      const auto begin = raw.find_first_not_of(" \t\r");
      if (begin == std::string::npos) continue;
      const auto end = raw.find_last_not_of(" \t\r");
      std::string trimmed = raw.substr(begin, end - begin + 1);
      if (!saw_magic) {
        if (trimmed != "drmdp-spec v1") parse_fail(line_no, "expected header 'drmdp-spec v1'");
        saw_magic = true;
        continue;
      }
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']') parse_fail(line_no, "malformed section header");
        current = trimmed.substr(1, trimmed.size() - 2);
        static const char* known[] = {"states",   "actions", "transition", "initial",
                                      "interval", "gamma",   "overlap",    "reward"};
        bool ok = false;
        for (const char* k : known) ok = ok || current == k;
        if (!ok) parse_fail(line_no, "unknown section [" + current + "]");
        sections[current];  // present even if empty
        continue;
      }
      if (current.empty()) parse_fail(line_no, "content before any section");
      sections[current].push_back({line_no, trimmed});
    }
    if (!saw_magic) throw std::invalid_argument("spec parse: empty input");
  }

  for (const char* required : {"states", "actions", "transition", "initial", "interval",
                               "gamma", "overlap", "reward"}) {
    if (!sections.count(required)) {
      throw std::invalid_argument(std::string("spec parse: missing section [") + required + "]");
    }
  }

  DrmdpSpec spec;

  for (const auto& [no, text_line] : sections["states"]) {
    auto tokens = split_tokens(text_line);
    if (tokens.size() != 1) parse_fail(no, "expected one state name per line");
    spec.state_names.push_back(tokens[0]);
  }
  spec.action_names.resize(spec.state_names.size());
  spec.transition.resize(spec.state_names.size());

  auto find_state = [&spec](const std::string& name, int no) {
    for (std::size_t s = 0; s < spec.state_names.size(); ++s) {
      if (spec.state_names[s] == name) return static_cast<StateId>(s);
    }
    parse_fail(no, "unknown state '" + name + "'");
  };
  auto find_action = [&spec](StateId s, const std::string& name, int no) {
    for (std::size_t a = 0; a < spec.action_names[s].size(); ++a) {
      if (spec.action_names[s][a] == name) return static_cast<ActionId>(a);
    }
    parse_fail(no, "unknown action '" + name + "' at state '" + spec.state_names[s] + "'");
  };

  for (const auto& [no, text_line] : sections["actions"]) {
    const auto colon = text_line.find(':');
    if (colon == std::string::npos) parse_fail(no, "expected 'state: actions...'");
    auto head = split_tokens(text_line.substr(0, colon));
    if (head.size() != 1) parse_fail(no, "expected one state before ':'");
    const StateId s = find_state(head[0], no);
    auto actions = split_tokens(text_line.substr(colon + 1));
    if (actions.empty()) parse_fail(no, "state '" + head[0] + "' lists no actions");
    if (!spec.action_names[s].empty()) parse_fail(no, "duplicate action line for '" + head[0] + "'");
    spec.action_names[s] = actions;
    spec.transition[s].resize(actions.size());
  }

  for (const auto& [no, text_line] : sections["transition"]) {
    auto tokens = split_tokens(text_line);
    if (tokens.size() != 4) parse_fail(no, "expected 's a s' p'");
    const StateId s = find_state(tokens[0], no);
    const ActionId a = find_action(s, tokens[1], no);
    const StateId next = find_state(tokens[2], no);
    spec.transition[s][a].emplace_back(next, parse_number(tokens[3], no));
  }

  for (const auto& [no, text_line] : sections["initial"]) {
    auto tokens = split_tokens(text_line);
    if (tokens.size() != 2) parse_fail(no, "expected 's p'");
    const StateId s = find_state(tokens[0], no);
    spec.initial_dist.emplace_back(s, parse_number(tokens[1], no));
  }

  {
    std::vector<std::int32_t> support;
    std::vector<double> probs;
    for (const auto& [no, text_line] : sections["interval"]) {
      auto tokens = split_tokens(text_line);
      if (tokens.size() != 2) parse_fail(no, "expected 'n p'");
      support.push_back(static_cast<std::int32_t>(parse_number(tokens[0], no)));
      probs.push_back(parse_number(tokens[1], no));
    }
    if (support.empty()) throw std::invalid_argument("spec parse: [interval] is empty");
    spec.interval_law = IntervalLaw(std::move(support), std::move(probs));
  }

  {
    const auto& lines = sections["gamma"];
    if (lines.size() != 1) throw std::invalid_argument("spec parse: [gamma] needs one line");
    spec.gamma = parse_number(lines[0].text, lines[0].number);
  }
  {
    const auto& lines = sections["overlap"];
    if (lines.size() != 1) throw std::invalid_argument("spec parse: [overlap] needs one line");
    spec.overlap_c = static_cast<std::int32_t>(parse_number(lines[0].text, lines[0].number));
  }

  // Per-step table defaults to all zeros; 'step' lines override entries.
  spec.reward.step_reward.resize(spec.state_names.size());
  for (std::size_t s = 0; s < spec.state_names.size(); ++s) {
    spec.reward.step_reward[s].assign(spec.action_names[s].size(), 0.0);
  }

  bool saw_kind = false;
  for (const auto& [no, text_line] : sections["reward"]) {
    auto tokens = split_tokens(text_line);
    if (tokens[0] == "kind") {
      if (tokens.size() != 2) parse_fail(no, "expected 'kind <name>'");
      saw_kind = true;
      if (tokens[1] == "sum") spec.reward.kind = RewardKind::Sum;
      else if (tokens[1] == "max") spec.reward.kind = RewardKind::Max;
      else if (tokens[1] == "square") spec.reward.kind = RewardKind::Square;
      else if (tokens[1] == "weighted_sum") spec.reward.kind = RewardKind::WeightedSum;
      else if (tokens[1] == "tabulated") spec.reward.kind = RewardKind::Tabulated;
      else parse_fail(no, "unknown reward kind '" + tokens[1] + "'");
    } else if (tokens[0] == "step") {
      if (tokens.size() != 4) parse_fail(no, "expected 'step s a value'");
      const StateId s = find_state(tokens[1], no);
      const ActionId a = find_action(s, tokens[2], no);
      spec.reward.step_reward[s][a] = parse_number(tokens[3], no);
    } else if (tokens[0] == "weights") {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        spec.reward.weights.push_back(parse_number(tokens[i], no));
      }
    } else if (tokens[0] == "entry") {
      const auto arrow = text_line.find("->");
      if (arrow == std::string::npos) parse_fail(no, "entry needs '-> value'");
      std::vector<Step> steps;
      std::string left = text_line.substr(5, arrow - 5);
      std::istringstream chunks(left);
      std::string chunk;
      while (std::getline(chunks, chunk, ',')) {
        auto parts = split_tokens(chunk);
        if (parts.size() == 1 && parts[0] == "~") {
          steps.push_back({kPaddingState, kPaddingAction});
        } else if (parts.size() == 2) {
          const StateId s = find_state(parts[0], no);
          steps.push_back({s, find_action(s, parts[1], no)});
        } else {
          parse_fail(no, "entry step must be 's a' or '~'");
        }
      }
      auto value_tokens = split_tokens(text_line.substr(arrow + 2));
      if (value_tokens.size() != 1) parse_fail(no, "entry needs one value after '->'");
      spec.reward.table[std::move(steps)] = parse_number(value_tokens[0], no);
    } else {
      parse_fail(no, "unknown reward directive '" + tokens[0] + "'");
    }
  }
  if (!saw_kind) throw std::invalid_argument("spec parse: [reward] is missing 'kind'");

  spec.validate();
  return spec;
}

}  // namespace drlab
