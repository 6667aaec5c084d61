#include "secaloha/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "secaloha/errors.hpp"

namespace secaloha {
namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::map<std::string, Section> read_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  static const char* kSections[] = {"channel", "system", "sim", "output"};
  std::map<std::string, Section> sections;
  std::string current;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header", line_no);
      current = trim(line.substr(1, line.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), current) ==
          std::end(kSections))
        throw ConfigError("unknown section [" + current + "]", line_no);
      sections[current];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line_no);
    if (current.empty())
      throw ConfigError("key outside of any section", line_no);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", line_no);
    auto& section = sections[current];
    if (section.count(key))
      throw ConfigError("duplicate key '" + key + "'", line_no);
    section[key] = Entry{trim(line.substr(eq + 1)), line_no, false};
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(Section* section, std::string name)
      : section_(section), name_(std::move(name)) {}

  bool present() const { return section_ != nullptr; }

  Entry* find(const std::string& key) const {
    if (section_ == nullptr) return nullptr;
    auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& key) const {
    Entry* e = find(key);
    if (e == nullptr)
      throw ConfigError("missing key '" + key + "' in section [" + name_ + "]");
    return *e;
  }

  double number(const std::string& key) const { return to_number(require(key)); }

  double number_or(const std::string& key, double fallback) const {
    Entry* e = find(key);
    return e != nullptr ? to_number(*e) : fallback;
  }

  std::uint64_t integer(const std::string& key) const {
    return to_integer(require(key));
  }

  std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const {
    Entry* e = find(key);
    return e != nullptr ? to_integer(*e) : fallback;
  }

  bool flag_or(const std::string& key, bool fallback) const {
    Entry* e = find(key);
    if (e == nullptr) return fallback;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected a boolean for '" + key + "'", e->line);
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected) const {
    const Entry& e = require(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty())
        throw ConfigError("empty list element for '" + key + "'", e.line);
      out.push_back(parse_double(item, key, e.line));
    }
    if (out.size() != expected)
      throw ConfigError("'" + key + "' needs " + std::to_string(expected) +
                            " comma-separated values, got " +
                            std::to_string(out.size()),
                        e.line);
    return out;
  }

  std::string text_or(const std::string& key, const std::string& fallback) const {
    Entry* e = find(key);
    return e != nullptr ? e->value : fallback;
  }

  void reject_unknown() const {
    if (section_ == nullptr) return;
    for (const auto& [key, entry] : *section_) {
      if (!entry.used)
        throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]",
                          entry.line);
    }
  }

 private:
  static double parse_double(const std::string& text, const std::string& key,
                             int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      throw ConfigError("expected a number for '" + key + "'", line);
    }
    if (pos != text.size())
      throw ConfigError("trailing characters after number for '" + key + "'", line);
    return v;
  }

  double to_number(const Entry& e) const {
    return parse_double(e.value, current_key(e), e.line);
  }

  std::uint64_t to_integer(const Entry& e) const {
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(e.value, &pos);
    } catch (const std::exception&) {
      throw ConfigError("expected a non-negative integer", e.line);
    }
    if (pos != e.value.size())
      throw ConfigError("trailing characters after integer", e.line);
    return v;
  }

  std::string current_key(const Entry& e) const {
    for (const auto& [key, entry] : *section_)
      if (&entry == &e) return key;
    return "?";
  }

  Section* section_;
  std::string name_;
};

}  // namespace

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Both: return "both";
  }
  return "both";
}

RunConfig parse_run_config(const std::string& path) {
  auto sections = read_ini(path);
  auto reader = [&](const char* name) {
    auto it = sections.find(name);
    return SectionReader(it == sections.end() ? nullptr : &it->second, name);
  };

  RunConfig cfg;

  const auto channel = reader("channel");
  if (channel.present()) {
    ChannelParams cp;
    cp.n_users = static_cast<int>(channel.integer("n_users"));
    if (cp.n_users < 2)
      throw ConfigError("channel n_users must be >= 2",
                        channel.require("n_users").line);
    cp.power = channel.number("power");
    cp.mean_gain_base =
        channel.numbers("mean_gain_base", static_cast<std::size_t>(cp.n_users));
    cp.mean_gain_cross = channel.numbers(
        "mean_gain_cross",
        static_cast<std::size_t>(cp.n_users) * static_cast<std::size_t>(cp.n_users));
    cfg.channel_samples = channel.integer("n_samples");
    if (cfg.channel_samples < 1)
      throw ConfigError("channel n_samples must be >= 1",
                        channel.require("n_samples").line);
    cfg.channel_seed = channel.integer("seed");
    cfg.channel_positive_part = channel.flag_or("positive_part", false);
    channel.reject_unknown();
    cfg.channel = std::move(cp);
  }

  const auto system = reader("system");
  if (system.present()) {
    SystemParams sp;
    sp.n_users = static_cast<int>(system.integer("n_users"));
    if (sp.n_users < 2)
      throw ConfigError("system n_users must be >= 2",
                        system.require("n_users").line);
    const auto n = static_cast<std::size_t>(sp.n_users);
    sp.arrival = system.numbers("arrival", n);
    sp.tx_prob = system.numbers("tx_prob", n);
    sp.fail_prob = system.numbers("fail_prob", n);
    const Entry& rho = system.require("rho");
    if (trim(rho.value) == "from-channel") {
      cfg.rho_from_channel = true;
      sp.rho.assign(n, 0.0);  // placeholder until the channel estimate runs
      if (!cfg.channel.has_value())
        throw ConfigError("rho = from-channel requires a [channel] section",
                          rho.line);
      if (cfg.channel->n_users != sp.n_users)
        throw ConfigError("channel and system n_users differ", rho.line);
    } else {
      sp.rho = system.numbers("rho", n);
    }
    system.reject_unknown();
    cfg.system = std::move(sp);
  }

  const auto sim = reader("sim");
  if (sim.present()) {
    if (!cfg.system.has_value())
      throw ConfigError("[sim] requires a [system] section");
    SimConfig sc;
    sc.params = *cfg.system;
    sc.n_slots = sim.integer("n_slots");
    if (sc.n_slots < 1)
      throw ConfigError("n_slots must be >= 1", sim.require("n_slots").line);
    sc.warmup_slots = sim.integer_or("warmup_slots", 0);
    if (sc.warmup_slots >= sc.n_slots)
      throw ConfigError("warmup_slots must be smaller than n_slots",
                        sim.require("n_slots").line);
    sc.seed = sim.integer("seed");
    sc.dominant_mode = sim.flag_or("dominant_mode", false);
    sc.replications = static_cast<int>(sim.integer_or("replications", 1));
    if (sc.replications < 1)
      throw ConfigError("replications must be >= 1");
    sc.drift_threshold = sim.number_or("drift_threshold", 0.01);
    if (!(sc.drift_threshold > 0.0))
      throw ConfigError("drift_threshold must be > 0");
    cfg.sim_trace = sim.flag_or("trace", false);
    sim.reject_unknown();
    cfg.sim = std::move(sc);
  }

  const auto output = reader("output");
  if (output.present()) {
    cfg.output_dir = output.text_or("dir", "out");
    const std::string format = output.text_or("format", "both");
    if (format == "csv") {
      cfg.output_format = OutputFormat::Csv;
    } else if (format == "json") {
      cfg.output_format = OutputFormat::Json;
    } else if (format == "both") {
      cfg.output_format = OutputFormat::Both;
    } else {
      throw ConfigError("output format must be csv, json or both");
    }
    output.reject_unknown();
  }

  return cfg;
}

}  // namespace secaloha
