#include "emfreeze/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace emfreeze {

namespace {

namespace pt = boost::property_tree;

constexpr std::array<std::pair<Experiment, std::string_view>, 9> kExperimentNames{{
    {Experiment::fig2_entropy, "fig2_entropy"},
    {Experiment::fig2_hamming_schmidt, "fig2_hamming_schmidt"},
    {Experiment::fig3_single_particle, "fig3_single_particle"},
    {Experiment::fig4_overlap, "fig4_overlap"},
    {Experiment::fig5_overlap_jcross, "fig5_overlap_jcross"},
    {Experiment::fig6_spectral, "fig6_spectral"},
    {Experiment::fig7_ghz, "fig7_ghz"},
    {Experiment::freeze_demo, "freeze_demo"},
    {Experiment::custom, "custom"},
}};

constexpr std::array<std::pair<InitialState, std::string_view>, 8> kStateNames{{
    {InitialState::none, "none"},
    {InitialState::density_wave, "density_wave"},
    {InitialState::domain_wall, "domain_wall"},
    {InitialState::single_corner, "single_corner"},
    {InitialState::two_corners, "two_corners"},
    {InitialState::three_corner_cluster, "three_corner_cluster"},
    {InitialState::dicke_minus_y, "dicke_minus_y"},
    {InitialState::explicit_sites, "explicit"},
}};

constexpr std::array<std::pair<HfModel, std::string_view>, 3> kModelNames{{
    {HfModel::transfer, "transfer"},
    {HfModel::two_spin_interacting, "two_spin_interacting"},
    {HfModel::oat, "oat"},
}};

template <class Table, class E>
std::string_view name_of(const Table& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <class Table>
auto value_of(const Table& table, std::string_view name, const std::string& path) {
  for (const auto& [v, n] : table) {
    if (n == name) return v;
  }
  throw ConfigError(path + ": unrecognized value '" + std::string(name) + "'");
}

const std::map<std::string, std::set<std::string>, std::less<>> kSchema{
    {"experiment", {"name"}},
    {"lattice", {"geometry", "sizes"}},
    {"state", {"initial", "sites", "particles"}},
    {"model", {"hf", "j_cross", "lambda", "qubits"}},
    {"emergent", {"variants"}},
    {"time", {"start", "stop", "count", "extra", "t_freeze"}},
    {"output", {"directory", "histogram_bins"}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

// A number, optionally followed by "pi" and "/ divisor": 1.5, -pi/2, 3*pi/2, 4pi.
double parse_real(const std::string& raw, const std::string& path) {
  static const std::regex form(
      R"(^([+-])?((?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)?\s*\*?\s*(pi)?\s*(?:/\s*([0-9]+\.?[0-9]*))?$)");
  const std::string text = trim(raw);
  std::smatch m;
  if (!std::regex_match(text, m, form) || (!m[2].matched && !m[3].matched) ||
      (m[2].matched && !m[3].matched && text.find('*') != std::string::npos)) {
    throw ConfigError(path + ": '" + text + "' is not a real number");
  }
  double value = 1.0;
  if (m[2].matched) {
    const std::string num = m[2].str();
    const auto res = std::from_chars(num.data(), num.data() + num.size(), value);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
      throw ConfigError(path + ": '" + text + "' is not a real number");
    }
  }
  if (m[3].matched) value *= kPi;
  if (m[4].matched) {
    const double div = std::stod(m[4].str());
    if (div == 0.0) throw ConfigError(path + ": division by zero");
    value /= div;
  }
  if (m[1].matched && m[1].str() == "-") value = -value;
  if (!std::isfinite(value)) throw ConfigError(path + ": value must be finite");
  return value;
}

int parse_int(const std::string& raw, const std::string& path) {
  const std::string text = trim(raw);
  int value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(path + ": '" + text + "' is not an integer");
  }
  return value;
}

std::pair<int, int> parse_size(const std::string& raw, bool rectangle, const std::string& path) {
  const auto x = raw.find('x');
  if (rectangle) {
    if (x == std::string::npos) throw ConfigError(path + ": rectangle sizes are written like 6x6");
    return {parse_int(raw.substr(0, x), path), parse_int(raw.substr(x + 1), path)};
  }
  if (x != std::string::npos) throw ConfigError(path + ": chain sizes are single integers");
  return {parse_int(raw, path), 1};
}

ExperimentConfig defaults_for(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.output_dir = "out/" + std::string(to_string(e));
  switch (e) {
    case Experiment::fig2_entropy:
      c.sizes = {{16, 1}};
      c.state = InitialState::density_wave;
      c.variants = {EmergentTag::Exact1D};
      c.time = {0.0, 4.0 * kPi, 481, {}};
      c.t_freeze = 1.5 * kPi;
      break;
    case Experiment::fig2_hamming_schmidt:
      c.sizes = {{16, 1}};
      c.state = InitialState::density_wave;
      c.time = {0.0, 0.0, 0, {0.0, 0.25 * kPi, 0.5 * kPi, kPi}};
      break;
    case Experiment::fig3_single_particle:
      c.rectangle = true;
      c.sizes = {{4, 4}};
      c.state = InitialState::single_corner;
      c.variants = {EmergentTag::Exact2D_NN};
      c.time = {0.0, 4.0 * kPi, 481, {}};
      break;
    case Experiment::fig4_overlap:
      c.rectangle = true;
      c.sizes = {{4, 4}, {6, 6}, {8, 8}, {10, 10}};
      c.state = InitialState::two_corners;
      c.variants = {EmergentTag::Trunc1, EmergentTag::Trunc2, EmergentTag::SpinPromoted};
      c.time = {0.0, 3.0, 200, {}};
      break;
    case Experiment::fig5_overlap_jcross:
      c.rectangle = true;
      c.sizes = {{6, 6}};
      c.state = InitialState::three_corner_cluster;
      c.j_cross = {0.0, 0.2, 0.4, 0.6};
      c.variants = {EmergentTag::Trunc2};
      c.time = {0.0, 3.0, 200, {}};
      break;
    case Experiment::fig6_spectral:
      c.rectangle = true;
      c.sizes = {{4, 4}};
      c.particles = 3;
      c.j_cross = {0.6};
      c.variants = {EmergentTag::UnitaryExact};
      c.time = {0.0, 40.0, 80, {0.0, 0.5, 5.0, 40.0}};
      break;
    case Experiment::fig7_ghz:
      c.hf = HfModel::oat;
      c.state = InitialState::dicke_minus_y;
      c.qubits = {4, 8, 12};
      c.variants = {EmergentTag::OAT};
      c.time = {0.0, 4.0 * kPi, 600, {}};
      break;
    case Experiment::freeze_demo:
      c.sizes = {{8, 1}};
      c.state = InitialState::density_wave;
      c.variants = {EmergentTag::Exact1D};
      c.time = {0.0, 60.0, 601, {}};
      c.t_freeze = 1.5 * kPi;
      break;
    case Experiment::custom:
      c.sizes = {{8, 1}};
      c.state = InitialState::density_wave;
      c.time = {0.0, 2.0 * kPi, 101, {}};
      break;
  }
  return c;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool single_particle_state(const ExperimentConfig& c) {
  return c.state == InitialState::single_corner ||
         (c.state == InitialState::explicit_sites && c.sites.size() == 1) ||
         (c.state == InitialState::none && c.particles == 1);
}

void validate(const ExperimentConfig& c) {
  // Time grid.
  require(c.time.count >= 0, "time.count: must be non-negative");
  if (c.time.count >= 2) require(c.time.stop > c.time.start, "time.stop: must exceed time.start");
  require(!c.time.times().empty(), "time: the grid is empty (set time.count or time.extra)");
  if (c.t_freeze) require(*c.t_freeze >= 0.0, "time.t_freeze: must be non-negative");
  require(c.histogram_bins >= 0, "output.histogram_bins: must be non-negative");
  require(!c.output_dir.empty(), "output.directory: must not be empty");

  const bool oat = c.hf == HfModel::oat;
  if (oat) {
    require(c.experiment == Experiment::fig7_ghz, "model.hf: 'oat' is only used by fig7_ghz");
    require(!c.qubits.empty(), "model.qubits: at least one qubit count is required");
    for (int q : c.qubits) require(q >= 2 && q <= 4096, "model.qubits: counts must lie in [2, 4096]");
    require(c.lambda > 0.0, "model.lambda: must be positive");
    require(c.sizes.empty(), "lattice.sizes: not used by the OAT model; leave empty");
    require(c.state == InitialState::dicke_minus_y, "state.initial: OAT starts from dicke_minus_y");
    require(c.variants == std::vector<EmergentTag>{EmergentTag::OAT},
            "emergent.variants: the OAT model uses the OAT variant");
    return;
  }

  require(c.qubits.empty(), "model.qubits: only used with model.hf = oat");
  require(c.state != InitialState::dicke_minus_y, "state.initial: dicke_minus_y needs model.hf = oat");
  require(!c.sizes.empty(), "lattice.sizes: at least one size is required");
  for (const auto& [lx, ly] : c.sizes) {
    require(lx >= 1 && ly >= 1 && lx * ly >= 2 && lx * ly <= kMaxSites,
            "lattice.sizes: " + std::to_string(lx) + "x" + std::to_string(ly) +
                " must have between 2 and " + std::to_string(kMaxSites) + " sites");
    if (!c.rectangle) require(ly == 1, "lattice.sizes: chains take a single length");
  }
  require(!c.j_cross.empty(), "model.j_cross: at least one value is required");
  if (!c.rectangle) {
    require(c.j_cross == std::vector<double>{0.0}, "model.j_cross: chains have no diagonal hopping");
  }

  switch (c.state) {
    case InitialState::none:
      require(c.particles >= 1, "state.particles: required (>= 1) when state.initial = none");
      break;
    case InitialState::explicit_sites:
      require(!c.sites.empty(), "state.sites: required when state.initial = explicit");
      break;
    case InitialState::density_wave:
    case InitialState::domain_wall:
      require(!c.rectangle, "state.initial: " + std::string(to_string(c.state)) + " needs a chain");
      break;
    case InitialState::single_corner:
    case InitialState::two_corners:
    case InitialState::three_corner_cluster:
      require(c.rectangle, "state.initial: " + std::string(to_string(c.state)) + " needs a rectangle");
      break;
    case InitialState::dicke_minus_y:
      break;
  }
  if (c.state != InitialState::explicit_sites) {
    require(c.sites.empty(), "state.sites: only used when state.initial = explicit");
  }
  if (c.state != InitialState::none) {
    require(c.particles == 0, "state.particles: only used when state.initial = none");
  }

  if (c.hf == HfModel::two_spin_interacting) {
    require(c.rectangle, "model.hf: two_spin_interacting needs a rectangle");
    require(single_particle_state(c), "model.hf: two_spin_interacting acts on one excitation");
    require(c.j_cross == std::vector<double>{0.0}, "model.j_cross: not used by two_spin_interacting");
  }
  for (EmergentTag tag : c.variants) {
    require(tag != EmergentTag::OAT, "emergent.variants: OAT needs model.hf = oat");
    if (tag == EmergentTag::Exact1D) require(!c.rectangle, "emergent.variants: Exact1D needs a chain");
    if (tag == EmergentTag::Exact2D_NN || tag == EmergentTag::SpinPromoted ||
        tag == EmergentTag::Exact2D_TwoSpinNNN || tag == EmergentTag::Trunc1_Appendix ||
        tag == EmergentTag::Trunc2_Appendix || tag == EmergentTag::Trunc1_NNN_Appendix) {
      require(c.rectangle, "emergent.variants: " + std::string(to_string(tag)) + " needs a rectangle");
    }
    if (tag == EmergentTag::Exact2D_NN || tag == EmergentTag::Exact2D_TwoSpinNNN) {
      require(single_particle_state(c),
              "emergent.variants: " + std::string(to_string(tag)) + " acts on one excitation");
    }
    if (tag == EmergentTag::Exact2D_TwoSpinNNN) {
      require(c.hf == HfModel::two_spin_interacting,
              "emergent.variants: Exact2D_TwoSpinNNN belongs to model.hf = two_spin_interacting");
    }
    if (c.hf == HfModel::two_spin_interacting) {
      require(tag == EmergentTag::Exact2D_TwoSpinNNN,
              "emergent.variants: two_spin_interacting supports only Exact2D_TwoSpinNNN");
    }
    if (tag == EmergentTag::Trunc1_Appendix || tag == EmergentTag::Trunc2_Appendix ||
        tag == EmergentTag::Exact2D_NN || tag == EmergentTag::SpinPromoted) {
      require(c.j_cross == std::vector<double>{0.0},
              "emergent.variants: " + std::string(to_string(tag)) + " assumes model.j_cross = 0");
    }
  }
  if (c.t_freeze) require(!c.variants.empty(), "emergent.variants: a freeze needs a variant");

  const std::string e = std::string(to_string(c.experiment));
  switch (c.experiment) {
    case Experiment::fig2_entropy:
    case Experiment::fig2_hamming_schmidt:
      require(!c.rectangle, "lattice.geometry: " + e + " needs a chain");
      require(c.variants.size() <= 1, "emergent.variants: " + e + " takes at most one variant");
      break;
    case Experiment::fig3_single_particle:
      require(c.rectangle, "lattice.geometry: " + e + " needs a rectangle");
      require(single_particle_state(c), "state.initial: " + e + " needs a single excitation");
      require(c.j_cross.size() == 1, "model.j_cross: " + e + " takes a single value");
      require(c.variants.size() <= 1, "emergent.variants: " + e + " takes at most one variant");
      break;
    case Experiment::fig4_overlap: {
      require(c.rectangle, "lattice.geometry: " + e + " needs a rectangle");
      auto v = c.variants;
      std::sort(v.begin(), v.end());
      require(v == std::vector<EmergentTag>{EmergentTag::Trunc1, EmergentTag::Trunc2,
                                            EmergentTag::SpinPromoted},
              "emergent.variants: " + e + " compares Trunc1, Trunc2 and SpinPromoted");
      require(!c.t_freeze, "time.t_freeze: not used by " + e);
      break;
    }
    case Experiment::fig5_overlap_jcross:
      require(c.rectangle, "lattice.geometry: " + e + " needs a rectangle");
      require(c.variants == std::vector<EmergentTag>{EmergentTag::Trunc2},
              "emergent.variants: " + e + " uses Trunc2");
      require(!c.t_freeze, "time.t_freeze: not used by " + e);
      break;
    case Experiment::fig6_spectral:
      require(c.variants == std::vector<EmergentTag>{EmergentTag::UnitaryExact},
              "emergent.variants: " + e + " uses UnitaryExact");
      require(c.hf == HfModel::transfer, "model.hf: " + e + " uses the transfer model");
      require(c.j_cross.size() == 1, "model.j_cross: " + e + " takes a single value");
      require(c.sizes.size() == 1, "lattice.sizes: " + e + " takes a single size");
      require(!c.t_freeze, "time.t_freeze: not used by " + e);
      break;
    case Experiment::fig7_ghz:
      require(oat, "model.hf: " + e + " needs model.hf = oat");
      break;
    case Experiment::freeze_demo:
      require(c.t_freeze.has_value(), "time.t_freeze: required by " + e);
      require(c.variants.size() == 1, "emergent.variants: " + e + " takes exactly one variant");
      require(c.j_cross.size() == 1, "model.j_cross: " + e + " takes a single value");
      break;
    case Experiment::custom:
      require(c.j_cross.size() == 1, "model.j_cross: " + e + " takes a single value");
      break;
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += ", ";
    out += items[k];
  }
  return out;
}

template <class T, class F>
std::string join_map(const std::vector<T>& items, F&& f) {
  std::vector<std::string> parts;
  parts.reserve(items.size());
  for (const T& x : items) parts.push_back(f(x));
  return join(parts);
}

}  // namespace

std::string_view to_string(Experiment e) { return name_of(kExperimentNames, e); }
std::string_view to_string(InitialState s) { return name_of(kStateNames, s); }
std::string_view to_string(HfModel m) { return name_of(kModelNames, m); }

const std::vector<Experiment>& named_experiments() {
  static const std::vector<Experiment> names = [] {
    std::vector<Experiment> v;
    for (const auto& [e, n] : kExperimentNames) {
      if (e != Experiment::custom) v.push_back(e);
    }
    return v;
  }();
  return names;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out = extra;
  for (int k = 0; k < count; ++k) {
    out.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError("line " + std::to_string(err.line()) + ": " + err.message());
  }

  for (const auto& [section, body] : tree) {
    const auto known = kSchema.find(section);
    if (!body.data().empty()) throw ConfigError("'" + section + "': key outside any section");
    if (known == kSchema.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) {
        throw ConfigError("unknown key '" + section + "." + key + "'");
      }
    }
  }

  auto get = [&tree](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  const auto name = get("experiment.name");
  if (!name) throw ConfigError("experiment.name: missing");
  ExperimentConfig c = defaults_for(value_of(kExperimentNames, *name, "experiment.name"));

  if (auto v = get("lattice.geometry")) {
    if (*v == "chain") {
      c.rectangle = false;
    } else if (*v == "rectangle") {
      c.rectangle = true;
    } else {
      throw ConfigError("lattice.geometry: expected chain or rectangle, got '" + *v + "'");
    }
    // A geometry override invalidates the default sizes.
    if (!get("lattice.sizes")) throw ConfigError("lattice.sizes: required when lattice.geometry is set");
  }
  if (auto v = get("lattice.sizes")) {
    c.sizes.clear();
    for (const auto& item : split_list(*v)) c.sizes.push_back(parse_size(item, c.rectangle, "lattice.sizes"));
  }

  if (auto v = get("state.initial")) c.state = value_of(kStateNames, *v, "state.initial");
  if (auto v = get("state.sites")) {
    c.sites.clear();
    for (const auto& item : split_list(*v)) c.sites.push_back(parse_int(item, "state.sites"));
  }
  if (auto v = get("state.particles")) {
    c.particles = trim(*v).empty() ? 0 : parse_int(*v, "state.particles");
  } else if (c.state != InitialState::none) {
    c.particles = 0;
  }

  if (auto v = get("model.hf")) c.hf = value_of(kModelNames, *v, "model.hf");
  if (auto v = get("model.j_cross")) {
    c.j_cross.clear();
    for (const auto& item : split_list(*v)) c.j_cross.push_back(parse_real(item, "model.j_cross"));
  }
  if (auto v = get("model.lambda")) c.lambda = parse_real(*v, "model.lambda");
  if (auto v = get("model.qubits")) {
    c.qubits.clear();
    for (const auto& item : split_list(*v)) c.qubits.push_back(parse_int(item, "model.qubits"));
  }

  if (auto v = get("emergent.variants")) {
    c.variants.clear();
    for (const auto& item : split_list(*v)) {
      const auto tag = parse_emergent_tag(item);
      if (!tag) throw ConfigError("emergent.variants: unknown variant '" + item + "'");
      c.variants.push_back(*tag);
    }
  }

  if (auto v = get("time.start")) c.time.start = parse_real(*v, "time.start");
  if (auto v = get("time.stop")) c.time.stop = parse_real(*v, "time.stop");
  if (auto v = get("time.count")) c.time.count = parse_int(*v, "time.count");
  if (auto v = get("time.extra")) {
    c.time.extra.clear();
    for (const auto& item : split_list(*v)) c.time.extra.push_back(parse_real(item, "time.extra"));
  }
  if (auto v = get("time.t_freeze")) {
    if (*v == "none" || v->empty()) {
      c.t_freeze.reset();
    } else {
      c.t_freeze = parse_real(*v, "time.t_freeze");
    }
  }

  if (auto v = get("output.directory")) c.output_dir = *v;
  if (auto v = get("output.histogram_bins")) c.histogram_bins = parse_int(*v, "output.histogram_bins");

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\nname = " << to_string(c.experiment) << "\n\n";
  if (c.hf != HfModel::oat) {
    out << "[lattice]\ngeometry = " << (c.rectangle ? "rectangle" : "chain") << "\nsizes = "
        << join_map(c.sizes,
                    [&](const std::pair<int, int>& s) {
                      return c.rectangle ? std::to_string(s.first) + "x" + std::to_string(s.second)
                                         : std::to_string(s.first);
                    })
        << "\n\n";
  } else {
    out << "[lattice]\nsizes =\n\n";
  }
  out << "[state]\ninitial = " << to_string(c.state) << "\n";
  out << "sites = " << join_map(c.sites, [](int s) { return std::to_string(s); }) << "\n";
  out << "particles = " << c.particles << "\n\n";
  out << "[model]\nhf = " << to_string(c.hf) << "\n";
  out << "j_cross = " << join_map(c.j_cross, format_double) << "\n";
  out << "lambda = " << format_double(c.lambda) << "\n";
  out << "qubits = " << join_map(c.qubits, [](int q) { return std::to_string(q); }) << "\n\n";
  out << "[emergent]\nvariants = "
      << join_map(c.variants, [](EmergentTag t) { return std::string(to_string(t)); }) << "\n\n";
  out << "[time]\nstart = " << format_double(c.time.start) << "\n";
  out << "stop = " << format_double(c.time.stop) << "\n";
  out << "count = " << c.time.count << "\n";
  out << "extra = " << join_map(c.time.extra, format_double) << "\n";
  out << "t_freeze = " << (c.t_freeze ? format_double(*c.t_freeze) : "none") << "\n\n";
  out << "[output]\ndirectory = " << c.output_dir << "\n";
  out << "histogram_bins = " << c.histogram_bins << "\n";
  return out.str();
}

}  // namespace emfreeze
