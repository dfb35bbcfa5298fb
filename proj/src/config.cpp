#include "tcdiff/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tcdiff {

namespace {

struct Entry {
  int line;
  std::string value;
  bool used = false;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

[[noreturn]] void fail(const std::string& name, int line, const std::string& why) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + why);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Sections tokenize(const std::string& text, const std::string& name) {
  static const char* known[] = {"run",  "dataset", "prior", "schedule",
                                "fno",  "train",   "sample"};
  Sections out;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(name, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
            return section == k;
          }) == std::end(known))
        fail(name, line, "unknown section [" + section + "]");
      out[section];
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(name, line, "expected key = value");
    if (section.empty()) fail(name, line, "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(name, line, "empty key");
    auto [it, inserted] = out[section].emplace(key, Entry{line, value});
    if (!inserted)
      fail(name, line, "duplicate key '" + key + "' (first at line " +
                           std::to_string(it->second.line) + ")");
  }
  return out;
}

class Reader {
 public:
  Reader(Sections& sections, std::string name)
      : sections_(sections), name_(std::move(name)) {}

  Entry* find(const std::string& section, const std::string& key) {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    kit->second.used = true;
    return &kit->second;
  }

  void get(const std::string& sec, const std::string& key, std::string& dst) {
    if (Entry* e = find(sec, key)) dst = e->value;
  }
  void get(const std::string& sec, const std::string& key, double& dst) {
    if (Entry* e = find(sec, key)) dst = parse_double(*e);
  }
  void get(const std::string& sec, const std::string& key, int& dst) {
    if (Entry* e = find(sec, key)) dst = parse_int(*e);
  }
  void get(const std::string& sec, const std::string& key, std::uint64_t& dst) {
    if (Entry* e = find(sec, key)) {
      try {
        // stoull wraps negative input around instead of throwing
        if (e->value.find('-') != std::string::npos) throw std::invalid_argument("");
        std::size_t pos = 0;
        dst = std::stoull(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("");
      } catch (...) {
        fail(name_, e->line, "expected unsigned integer, got '" + e->value + "'");
      }
    }
  }
  void get_pair(const std::string& sec, const std::string& key, int& a, int& b) {
    if (Entry* e = find(sec, key)) {
      std::istringstream is(e->value);
      if (!(is >> a >> b) || !(is >> std::ws).eof())
        fail(name_, e->line, "expected two integers, got '" + e->value + "'");
    }
  }

  double parse_double(const Entry& e) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(name_, e.line, "expected number, got '" + e.value + "'");
    }
  }
  int parse_int(const Entry& e) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(name_, e.line, "expected integer, got '" + e.value + "'");
    }
  }

  void reject_unused() {
    for (const auto& [sec, entries] : sections_)
      for (const auto& [key, e] : entries)
        if (!e.used)
          fail(name_, e.line, "unknown key '" + key + "' in [" + sec + "]");
  }

  const std::string& name() const { return name_; }

 private:
  Sections& sections_;
  std::string name_;
};

PriorKind prior_kind_from(const std::string& s, Reader& r, int line) {
  if (s == "invlaplacian") return PriorKind::InvLaplacian;
  if (s == "bessel") return PriorKind::Bessel;
  if (s == "fnofilter") return PriorKind::FnoFilter;
  if (s == "combined") return PriorKind::Combined;
  if (s == "standard") return PriorKind::Standard;
  fail(r.name(), line, "unknown prior kind '" + s + "'");
}

const char* prior_kind_name(PriorKind k) {
  switch (k) {
    case PriorKind::InvLaplacian: return "invlaplacian";
    case PriorKind::Bessel: return "bessel";
    case PriorKind::FnoFilter: return "fnofilter";
    case PriorKind::Combined: return "combined";
    case PriorKind::Standard: return "standard";
  }
  return "?";
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& name) {
  Sections sections = tokenize(text, name);
  Reader r(sections, name);
  RunConfig c;

  r.get("run", "seed", c.seed);
  r.get("run", "outdir", c.outdir);

  r.get("dataset", "kind", c.dataset.kind);
  if (c.dataset.kind != "gmm" && c.dataset.kind != "mnist") {
    Entry* e = r.find("dataset", "kind");
    fail(name, e ? e->line : 0, "unknown dataset kind '" + c.dataset.kind + "'");
  }
  r.get("dataset", "native_resolution", c.dataset.native_resolution);
  r.get("dataset", "mnist_images", c.dataset.mnist_images);
  r.get("dataset", "limit", c.dataset.limit);

  if (Entry* e = r.find("prior", "kind"))
    c.prior.kind = prior_kind_from(e->value, r, e->line);
  r.get("prior", "gamma0", c.prior.gamma0);
  r.get("prior", "gamma1", c.prior.gamma1);
  r.get("prior", "gamma2", c.prior.gamma2);
  r.get("prior", "power", c.prior.power);
  r.get_pair("prior", "filter_modes", c.prior.filter_m1, c.prior.filter_m2);
  r.get("prior", "filter_scale", c.prior.filter_scale);
  r.get("prior", "filter_seed", c.prior.filter_seed);

  r.get("schedule", "alpha_min", c.schedule.alpha_min);
  r.get("schedule", "alpha_max", c.schedule.alpha_max);
  r.get("schedule", "T", c.schedule.T);

  r.get("fno", "layers", c.fno.layers);
  r.get("fno", "width", c.fno.width);
  r.get_pair("fno", "modes", c.fno.modes1, c.fno.modes2);
  if (Entry* e = r.find("fno", "activation")) {
    if (e->value == "gelu")
      c.fno.act = Activation::Gelu;
    else if (e->value == "identity")
      c.fno.act = Activation::Identity;
    else
      fail(name, e->line, "unknown activation '" + e->value + "'");
  }

  if (Entry* e = r.find("train", "ladder")) {
    // an empty value keeps the ladder unset (callers fall back to a single
    // native-resolution level)
    c.train.ladder.clear();
    std::istringstream is(e->value);
    std::string tok;
    while (is >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        fail(name, e->line, "ladder entries are resolution:epochs");
      try {
        LadderLevel lv;
        lv.resolution = std::stoi(tok.substr(0, colon));
        lv.epochs = std::stoi(tok.substr(colon + 1));
        c.train.ladder.push_back(lv);
      } catch (...) {
        fail(name, e->line, "bad ladder entry '" + tok + "'");
      }
    }
  }
  r.get("train", "batch", c.train.batch);
  r.get("train", "steps_per_epoch", c.train.steps_per_epoch);
  r.get("train", "lr", c.train.adam.lr);
  r.get("train", "beta1", c.train.adam.beta1);
  r.get("train", "beta2", c.train.adam.beta2);
  r.get("train", "eps", c.train.adam.eps);
  r.get("train", "val_batch", c.train.val_batch);
  r.get("train", "checkpoint_every", c.train.checkpoint_every);

  r.get("sample", "count", c.sample.count);
  r.get("sample", "resolution", c.sample.resolution);
  r.get("sample", "steps", c.sample.steps);
  r.get("sample", "delta", c.sample.delta);
  r.get("sample", "n_proj", c.sample.n_proj);

  r.reject_unused();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config(os.str(), path);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[run]\n"
     << "seed = " << c.seed << "\n"
     << "outdir = " << c.outdir << "\n\n";
  os << "[dataset]\n"
     << "kind = " << c.dataset.kind << "\n"
     << "native_resolution = " << c.dataset.native_resolution << "\n"
     << "mnist_images = " << c.dataset.mnist_images << "\n"
     << "limit = " << c.dataset.limit << "\n\n";
  os << "[prior]\n"
     << "kind = " << prior_kind_name(c.prior.kind) << "\n"
     << "gamma0 = " << c.prior.gamma0 << "\n"
     << "gamma1 = " << c.prior.gamma1 << "\n"
     << "gamma2 = " << c.prior.gamma2 << "\n"
     << "power = " << c.prior.power << "\n"
     << "filter_modes = " << c.prior.filter_m1 << " " << c.prior.filter_m2 << "\n"
     << "filter_scale = " << c.prior.filter_scale << "\n"
     << "filter_seed = " << c.prior.filter_seed << "\n\n";
  os << "[schedule]\n"
     << "alpha_min = " << c.schedule.alpha_min << "\n"
     << "alpha_max = " << c.schedule.alpha_max << "\n"
     << "T = " << c.schedule.T << "\n\n";
  os << "[fno]\n"
     << "layers = " << c.fno.layers << "\n"
     << "width = " << c.fno.width << "\n"
     << "modes = " << c.fno.modes1 << " " << c.fno.modes2 << "\n"
     << "activation = "
     << (c.fno.act == Activation::Gelu ? "gelu" : "identity") << "\n\n";
  os << "[train]\n"
     << "ladder =";
  for (const auto& lv : c.train.ladder)
    os << " " << lv.resolution << ":" << lv.epochs;
  os << "\n"
     << "batch = " << c.train.batch << "\n"
     << "steps_per_epoch = " << c.train.steps_per_epoch << "\n"
     << "lr = " << c.train.adam.lr << "\n"
     << "beta1 = " << c.train.adam.beta1 << "\n"
     << "beta2 = " << c.train.adam.beta2 << "\n"
     << "eps = " << c.train.adam.eps << "\n"
     << "val_batch = " << c.train.val_batch << "\n"
     << "checkpoint_every = " << c.train.checkpoint_every << "\n\n";
  os << "[sample]\n"
     << "count = " << c.sample.count << "\n"
     << "resolution = " << c.sample.resolution << "\n"
     << "steps = " << c.sample.steps << "\n"
     << "delta = " << c.sample.delta << "\n"
     << "n_proj = " << c.sample.n_proj << "\n";
  return os.str();
}

}  // namespace tcdiff
