#include "slt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slt/errors.hpp"

namespace slt {

// ---- PGM -------------------------------------------------------------------

void write_pgm(const Frame& frame, std::ostream& out) {
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  const auto px = frame.pixels();
  out.write(reinterpret_cast<const char*>(px.data()),
            static_cast<std::streamsize>(px.size()));
}

std::string encode_pgm(const Frame& frame) {
  std::ostringstream out(std::ios::binary);
  write_pgm(frame, out);
  return std::move(out).str();
}

namespace {

class PgmCursor {
 public:
  explicit PgmCursor(std::string_view b) : bytes_(b) {}

  std::size_t pos() const noexcept { return pos_; }
  std::size_t token_start() const noexcept { return token_start_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (is_space(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    const std::size_t before = pos_;
    skip_space_and_comments();
    if (pos_ == before) {
      throw ParseError(std::string("pgm: expected whitespace before ") + what,
                       pos_);
    }
    token_start_ = pos_;
    long value = 0;
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + bytes_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first) {
      throw ParseError(std::string("pgm: bad ") + what, pos_);
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  void single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw ParseError("pgm: expected one whitespace byte after maxval", pos_);
    }
    ++pos_;
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
  std::size_t token_start_ = 2;
};

}  // namespace

Frame decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw ParseError("pgm: missing P5 magic", 0);
  }
  if (bytes[1] != '5') {
    throw ParseError(std::string("pgm: unsupported variant P") + bytes[1], 1);
  }
  PgmCursor cur(bytes);
  const long width = cur.number("width");
  const long height = cur.number("height");
  if (width <= 0 || height <= 0 || width > (1L << 20) || height > (1L << 20)) {
    throw ParseError("pgm: dimensions out of range", cur.pos());
  }
  const long maxval = cur.number("maxval");
  if (maxval != 255) {
    throw ParseError("pgm: maxval must be 255, got " + std::to_string(maxval),
                     cur.token_start());
  }
  cur.single_space();
  const auto need = static_cast<std::size_t>(width) * height;
  if (bytes.size() - cur.pos() < need) {
    throw ParseError("pgm: truncated payload, expected " +
                         std::to_string(need) + " bytes",
                     bytes.size());
  }
  const auto* data =
      reinterpret_cast<const std::uint8_t*>(bytes.data() + cur.pos());
  return Frame(static_cast<int>(width), static_cast<int>(height),
               std::vector<std::uint8_t>(data, data + need));
}

Frame read_pgm(std::istream& in) {
  std::string bytes{std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>()};
  return decode_pgm(bytes);
}

void save_pgm(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_pgm(frame, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Frame load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_pgm(in);
}

// ---- Config ----------------------------------------------------------------

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) throw type_error(key, "a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    used_.insert(key);
    const json& v = j_.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw type_error(key, "a number or null");
    return v.get<double>();
  }

  long long integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer()) throw type_error(key, "an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_unsigned()) throw type_error(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key) {
    const json& v = get(key);
    if (!v.is_boolean()) throw type_error(key, "a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) throw type_error(key, "a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key) { return Section(get(key), name(key)); }

  WorldPosition position(const std::string& key) {
    Section s = child(key);
    WorldPosition p{s.number("x"), s.number("z")};
    s.finish();
    return p;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      const std::string& k = item.key();
      if (!used_.contains(k)) throw ConfigError(name(k), "unknown key " + name(k));
    }
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  // Re-labels an invariant violation with this section's path.
  template <typename F>
  void checked(F&& validate) const {
    try {
      validate();
    } catch (const ConfigError& e) {
      throw ConfigError(name(e.key()), name(e.key()) + ": " + e.what());
    }
  }

 private:
  const json& get(const std::string& key) {
    if (!has(key)) throw ConfigError(name(key), "missing key " + name(key));
    used_.insert(key);
    return j_.at(key);
  }

  ConfigError type_error(const std::string& key, const char* expected) const {
    return ConfigError(name(key), name(key) + " must be " + expected);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

int to_int(Section& s, const std::string& key) {
  const long long v = s.integer(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(s.name(key), s.name(key) + " out of range");
  }
  return static_cast<int>(v);
}

TrajectorySpec parse_trajectory(Section& t, double foot_width,
                                std::optional<double> feet_gap) {
  TrajectorySpec spec;
  spec.foot_width = foot_width;
  spec.feet_gap = feet_gap;
  const std::string kind = t.string("kind");
  spec.rate_hz = t.number("rate_hz");
  spec.duration_s = t.number("duration_s");
  if (kind == "stationary") {
    spec.kind = TrajectoryKind::stationary;
    spec.position = t.position("position");
  } else if (kind == "stroll") {
    spec.kind = TrajectoryKind::stroll;
    spec.start = t.position("start");
    spec.end = t.position("end");
    spec.period_s = t.optional_number("period_s").value_or(0.0);
  } else if (kind == "circle") {
    spec.kind = TrajectoryKind::circle;
    spec.center = t.position("center");
    spec.radius = t.number("radius");
    spec.period_s = t.optional_number("period_s").value_or(0.0);
  } else {
    throw ConfigError(t.name("kind"),
                      "trajectory.kind must be stationary, stroll or circle");
  }
  t.finish();
  return spec;
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  Section top(root, "");
  RunConfig cfg;

  {
    Section s = top.child("rig");
    RigConfig::Params p;
    p.d = s.number("d");
    p.f = s.number("f");
    p.z_b = s.number("z_b");
    p.width = to_int(s, "width");
    p.height = to_int(s, "height");
    p.u0 = s.optional_number("u0").value_or(p.width / 2.0);
    p.v0 = s.optional_number("v0").value_or(p.height / 2.0);
    s.finish();
    s.checked([&] { cfg.rig = RigConfig(p); });
  }
  {
    Section s = top.child("detect");
    cfg.detect.ath_base = s.number("ath_base");
    cfg.detect.ath_slope = s.number("ath_slope");
    cfg.detect.ath_min = s.number("ath_min");
    cfg.detect.ath_max = s.number("ath_max");
    cfg.detect.min_run = to_int(s, "min_run");
    s.finish();
    s.checked([&] { cfg.detect.validate(); });
  }
  {
    Section s = top.child("noise");
    cfg.noise.background_mean = s.number("background_mean");
    cfg.noise.background_sigma = s.number("background_sigma");
    cfg.noise.seed = s.unsigned_integer("seed");
    s.finish();
    s.checked([&] { cfg.noise.validate(); });
  }
  {
    Section s = top.child("intensity");
    cfg.intensity.i_ref = s.number("i_ref");
    cfg.intensity.z_ref = s.number("z_ref");
    s.finish();
    s.checked([&] { cfg.intensity.validate(); });
  }
  if (top.has("render")) {
    Section s = top.child("render");
    cfg.render.line_sigma = s.optional_number("line_sigma").value_or(0.0);
    s.finish();
    s.checked([&] { cfg.render.validate(); });
  }
  if (top.has("smoother")) {
    Section s = top.child("smoother");
    cfg.smoother.enabled = s.boolean("enabled");
    cfg.smoother.alpha = s.number("alpha");
    s.finish();
    s.checked([&] { cfg.smoother.validate(); });
  }
  if (top.has("scene")) {
    Section s = top.child("scene");
    cfg.foot_width = s.number("foot_width");
    cfg.feet_gap = s.optional_number("feet_gap");
    s.finish();
    if (!(cfg.foot_width > 0.0)) {
      throw ConfigError("scene.foot_width", "scene.foot_width must be > 0");
    }
    if (cfg.feet_gap && !(*cfg.feet_gap >= 0.0)) {
      throw ConfigError("scene.feet_gap", "scene.feet_gap must be >= 0");
    }
  }
  if (top.has("trajectory")) {
    Section s = top.child("trajectory");
    TrajectorySpec spec = parse_trajectory(s, cfg.foot_width, cfg.feet_gap);
    // Construction validates rate, duration and the workspace bound.
    s.checked([&] { make_trajectory(spec, cfg.rig); });
    cfg.trajectory = spec;
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config " + path.string());
  std::string text{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  return parse_config(text);
}

// ---- Calibration file ------------------------------------------------------

std::string encode_calibration(const Calibration& cal) {
  return "v_b=" + std::to_string(cal.v_b) + "\n";
}

Calibration decode_calibration(std::string_view text, const RigConfig& rig) {
  constexpr std::string_view prefix = "v_b=";
  if (!text.starts_with(prefix)) {
    throw ParseError("calibration: expected \"v_b=<int>\"", 0);
  }
  int v_b = 0;
  const char* first = text.data() + prefix.size();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v_b);
  if (ec != std::errc{} || ptr == first) {
    throw ParseError("calibration: bad v_b", prefix.size());
  }
  std::string_view rest(ptr, static_cast<std::size_t>(last - ptr));
  if (rest != "\n" && !rest.empty()) {
    throw ParseError("calibration: trailing data",
                     static_cast<std::size_t>(ptr - text.data()));
  }
  if (v_b <= 0 || v_b >= rig.height() - 1) {
    throw ConfigError("v_b", "calibration: v_b " + std::to_string(v_b) +
                                 " outside (0, height-1)");
  }
  return {v_b, 0, rig.width(), rig.height()};
}

// ---- CSV -------------------------------------------------------------------

std::string format_fixed(double value, int decimals) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw std::runtime_error("format_fixed: overflow");
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no, const char* what) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("csv: bad ") + what + " field", line_no);
  }
  return value;
}

// Yields data lines after checking the header; strips a trailing '\r'.
std::vector<std::string> data_lines(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: missing header", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError("csv: unexpected header", 1);
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

void write_estimates_csv(const std::vector<PositionEstimate>& estimates,
                         std::ostream& out) {
  out << kEstimatesHeader << '\n';
  for (const auto& e : estimates) {
    out << e.frame_index << ',' << e.timestamp_ms << ',';
    if (e.pos && e.detection) {
      out << "1," << format_fixed(e.detection->u_f) << ',' << e.detection->v_f
          << ',' << format_fixed(e.pos->x) << ',' << format_fixed(e.pos->z);
    } else {
      out << "0,,,,";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_estimates_csv: write failed");
}

std::vector<PositionEstimate> read_estimates_csv(std::istream& in) {
  std::vector<PositionEstimate> out;
  std::size_t line_no = 1;
  for (const std::string& line : data_lines(in, kEstimatesHeader)) {
    ++line_no;
    const auto f = split_fields(line);
    if (f.size() != 7) throw ParseError("csv: expected 7 fields", line_no);
    PositionEstimate e;
    e.frame_index = parse_field<std::int64_t>(f[0], line_no, "frame");
    e.timestamp_ms = parse_field<std::int64_t>(f[1], line_no, "timestamp_ms");
    const int detected = parse_field<int>(f[2], line_no, "detected");
    if (detected == 1) {
      Detection d;
      d.u_f = parse_field<double>(f[3], line_no, "u_f");
      d.v_f = parse_field<int>(f[4], line_no, "v_f");
      d.u_start = static_cast<int>(std::floor(d.u_f));
      e.detection = d;
      e.pos = WorldPosition{parse_field<double>(f[5], line_no, "x_cm"),
                            parse_field<double>(f[6], line_no, "z_cm")};
    } else if (detected == 0) {
      for (int i = 3; i < 7; ++i) {
        if (!f[i].empty()) throw ParseError("csv: undetected row has values", line_no);
      }
    } else {
      throw ParseError("csv: detected must be 0 or 1", line_no);
    }
    out.push_back(e);
  }
  return out;
}

void write_truth_csv(const std::vector<SceneState>& truth, std::ostream& out) {
  out << kTruthHeader << '\n';
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& s = truth[i];
    out << i << ',' << s.timestamp_ms << ',';
    if (s.user) {
      out << "1," << format_fixed(s.user->x) << ',' << format_fixed(s.user->z);
    } else {
      out << "0,,";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_truth_csv: write failed");
}

std::vector<SceneState> read_truth_csv(std::istream& in) {
  std::vector<SceneState> out;
  std::size_t line_no = 1;
  for (const std::string& line : data_lines(in, kTruthHeader)) {
    ++line_no;
    const auto f = split_fields(line);
    if (f.size() != 5) throw ParseError("csv: expected 5 fields", line_no);
    const auto frame = parse_field<std::int64_t>(f[0], line_no, "frame");
    if (frame != static_cast<std::int64_t>(out.size())) {
      throw ParseError("csv: truth frames must be numbered 0,1,2,...", line_no);
    }
    SceneState s;
    s.timestamp_ms = parse_field<std::int64_t>(f[1], line_no, "timestamp_ms");
    const int present = parse_field<int>(f[2], line_no, "present");
    if (present == 1) {
      s.user = WorldPosition{parse_field<double>(f[3], line_no, "x_cm"),
                             parse_field<double>(f[4], line_no, "z_cm")};
    } else if (present != 0) {
      throw ParseError("csv: present must be 0 or 1", line_no);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace slt
