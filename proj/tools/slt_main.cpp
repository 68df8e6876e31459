// Command-line front end: simulate, calibrate, track, evaluate, bench, stream.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <memory>
#include <regex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "slt/detect.hpp"
#include "slt/errors.hpp"
#include "slt/io.hpp"
#include "slt/pipeline.hpp"
#include "slt/stream.hpp"
#include "slt/synth.hpp"

namespace fs = std::filesystem;
using namespace slt;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string frame_name(std::int64_t index) {
  std::ostringstream s;
  s << std::setw(6) << std::setfill('0') << index << ".pgm";
  return s.str();
}

double frame_rate(const RunConfig& cfg) {
  return cfg.trajectory ? cfg.trajectory->rate_hz : 20.0;
}

SceneState empty_scene(const RunConfig& cfg) {
  SceneState s;
  s.foot_width = cfg.foot_width;
  return s;
}

// Noise for the calibration capture is keyed on a frame index no trajectory
// frame uses.
constexpr std::int64_t kEmptyFrameIndex = -1;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir) {
  const RunConfig cfg = load_config(config_path);
  if (!cfg.trajectory) throw UsageError("simulate: config has no trajectory");
  const auto states = make_trajectory(*cfg.trajectory, cfg.rig);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  for (std::size_t i = 0; i < states.size(); ++i) {
    const Frame f = render(cfg.rig, states[i], cfg.noise, cfg.intensity,
                           static_cast<std::int64_t>(i), cfg.render);
    save_pgm(f, out_dir / frame_name(static_cast<std::int64_t>(i)));
  }
  save_pgm(render(cfg.rig, empty_scene(cfg), cfg.noise, cfg.intensity,
                  kEmptyFrameIndex, cfg.render),
           out_dir / "empty.pgm");
  std::ofstream truth(out_dir / "truth.csv");
  if (!truth) throw std::runtime_error("cannot write truth.csv");
  write_truth_csv(states, truth);
  std::cout << "wrote " << states.size() << " frames to " << out_dir.string()
            << '\n';
  return kOk;
}

int cmd_calibrate(const fs::path& config_path, const fs::path& frame_path,
                  const fs::path& out_path) {
  const RunConfig cfg = load_config(config_path);
  const Frame frame = load_pgm(frame_path);
  if (frame.width() != cfg.rig.width() || frame.height() != cfg.rig.height()) {
    throw ConfigError("rig", "calibration frame size does not match the rig");
  }
  const Calibration cal = calibrate(frame);
  std::cout << "v_b=" << cal.v_b << '\n';
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << encode_calibration(cal);
    if (!out) throw std::runtime_error("cannot write " + out_path.string());
  }
  return kOk;
}

std::vector<Frame> load_frames(const fs::path& dir, double rate_hz) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  static const std::regex numbered(R"((\d+)\.pgm)");
  std::vector<std::pair<std::int64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, numbered)) {
      files.emplace_back(std::stoll(m[1].str()), entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& [index, path] : files) {
    Frame f = load_pgm(path);
    f.set_index(index);
    f.set_timestamp_ms(std::llround(static_cast<double>(index) * 1000.0 / rate_hz));
    frames.push_back(std::move(f));
  }
  return frames;
}

int cmd_track(const fs::path& config_path, const fs::path& cal_path,
              const fs::path& frames_dir, const fs::path& out_csv,
              const std::string& stream_to, bool smooth) {
  const RunConfig cfg = load_config(config_path);
  const Calibration cal = decode_calibration(read_text(cal_path), cfg.rig);
  const auto frames = load_frames(frames_dir, frame_rate(cfg));
  SmootherConfig sm = cfg.smoother;
  if (smooth) sm.enabled = true;

  std::unique_ptr<PositionPublisher> publisher;
  if (!stream_to.empty()) publisher = std::make_unique<PositionPublisher>(stream_to);

  std::vector<PositionEstimate> estimates;
  if (publisher) {
    // Publish as each estimate is produced, smoothing inline.
    std::optional<ExponentialSmoother> smoother;
    if (sm.enabled) smoother.emplace(sm.alpha);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (i > 0 && frames[i].timestamp_ms() < frames[i - 1].timestamp_ms()) {
        throw InputError("track: timestamps go backwards");
      }
      PositionEstimate e = track_frame(frames[i], cfg.rig, cal, cfg.detect);
      if (smoother) {
        if (e.pos) e.pos = smoother->update(*e.pos); else smoother->reset();
      }
      publisher->publish(e);
      estimates.push_back(e);
    }
    publisher->close();
    std::cerr << "stream: " << publisher->sent() << " sent, "
              << publisher->dropped() << " dropped, "
              << publisher->send_failures() << " failed\n";
  } else {
    estimates = track_stream(frames, cfg.rig, cal, cfg.detect, sm);
  }

  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("cannot write " + out_csv.string());
  write_estimates_csv(estimates, out);
  const auto detected = std::count_if(estimates.begin(), estimates.end(),
                                      [](const auto& e) { return e.pos.has_value(); });
  std::cout << "tracked " << estimates.size() << " frames, " << detected
            << " detected\n";
  return kOk;
}

nlohmann::json metrics_json(const Metrics& m) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"rms_error_cm", opt(m.rms_error)},
          {"max_error_cm", opt(m.max_error)},
          {"p95_error_cm", opt(m.p95_error)},
          {"within_10cm_fraction", opt(m.within_10cm_fraction)},
          {"detection_rate", m.detection_rate},
          {"frames_per_second", opt(m.frames_per_second)},
          {"eligible", m.eligible},
          {"detected", m.detected},
          {"false_positives", m.false_positives}};
}

int cmd_evaluate(const fs::path& est_path, const fs::path& truth_path,
                 const fs::path& json_path) {
  std::ifstream est_in(est_path);
  std::ifstream truth_in(truth_path);
  if (!est_in) throw UsageError("cannot open " + est_path.string());
  if (!truth_in) throw UsageError("cannot open " + truth_path.string());
  const auto estimates = read_estimates_csv(est_in);
  const auto truth = read_truth_csv(truth_in);
  const Metrics m = evaluate(estimates, truth);

  auto show = [](const std::optional<double>& v) {
    return v ? format_fixed(*v) : std::string("n/a");
  };
  std::cout << "frames:        " << estimates.size() << '\n'
            << "detection:     " << format_fixed(m.detection_rate, 4) << " ("
            << m.detected << "/" << m.eligible << ")\n"
            << "rms error:     " << show(m.rms_error) << " cm\n"
            << "max error:     " << show(m.max_error) << " cm\n"
            << "p95 error:     " << show(m.p95_error) << " cm\n"
            << "within 10 cm:  "
            << (m.within_10cm_fraction ? format_fixed(*m.within_10cm_fraction, 4)
                                       : std::string("n/a"))
            << '\n';
  const std::string js = metrics_json(m).dump(2);
  if (json_path.empty()) {
    std::cout << js << '\n';
  } else {
    std::ofstream out(json_path);
    out << js << '\n';
    if (!out) throw std::runtime_error("cannot write " + json_path.string());
  }
  return kOk;
}

int cmd_bench(const fs::path& config_path, long long n_frames, int threads) {
  if (n_frames <= 0) throw UsageError("bench: --frames must be > 0");
  const RunConfig cfg = load_config(config_path);
  if (threads > 0) omp_set_num_threads(threads);

  TrajectorySpec spec;
  if (cfg.trajectory) {
    spec = *cfg.trajectory;
  } else {
    spec.foot_width = cfg.foot_width;
    spec.feet_gap = cfg.feet_gap;
  }
  const auto states = make_trajectory(spec, cfg.rig);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(n_frames));
  for (long long i = 0; i < n_frames; ++i) {
    SceneState s = states[static_cast<std::size_t>(i) % states.size()];
    s.timestamp_ms = std::llround(static_cast<double>(i) * 1000.0 / spec.rate_hz);
    frames.push_back(render(cfg.rig, s, cfg.noise, cfg.intensity, i, cfg.render));
  }
  const Calibration cal = calibrate(render(cfg.rig, empty_scene(cfg), cfg.noise,
                                           cfg.intensity, kEmptyFrameIndex,
                                           cfg.render));
  const TimedRun run = track_stream_timed(frames, cfg.rig, cal, cfg.detect);
  const double fps = static_cast<double>(frames.size()) / run.elapsed_s;
  const auto detected = std::count_if(run.estimates.begin(), run.estimates.end(),
                                      [](const auto& e) { return e.pos.has_value(); });
  std::cout << "frames=" << frames.size() << " size=" << cfg.rig.width() << "x"
            << cfg.rig.height() << " threads=" << omp_get_max_threads()
            << " detected=" << detected << '\n'
            << "elapsed_s=" << run.elapsed_s << '\n'
            << "fps=" << format_fixed(fps, 1) << '\n';
  return kOk;
}

int cmd_stream(const fs::path& est_path, const std::string& to, bool realtime) {
  std::ifstream in(est_path);
  if (!in) throw UsageError("cannot open " + est_path.string());
  const auto estimates = read_estimates_csv(in);
  PositionPublisher publisher(to);
  const auto t0 = std::chrono::steady_clock::now();
  const std::int64_t base = estimates.empty() ? 0 : estimates.front().timestamp_ms;
  for (const auto& e : estimates) {
    if (realtime) {
      std::this_thread::sleep_until(t0 + std::chrono::milliseconds(e.timestamp_ms - base));
    }
    publisher.publish(e);
  }
  publisher.close();
  std::cout << "sent " << publisher.sent() << " of " << estimates.size()
            << " (dropped " << publisher.dropped() << ", failed "
            << publisher.send_failures() << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-light floor position tracker"};
  app.require_subcommand(1);

  std::string config, out, frame, calibration, frames_dir, estimates, truth,
      json_out, stream_to;
  bool smooth = false, realtime = false;
  long long n_frames = 0;
  int threads = 0;

  auto* sim = app.add_subcommand("simulate", "Render a trajectory to PGM frames + truth.csv");
  sim->add_option("-c,--config", config, "Run configuration (JSON)")->required();
  sim->add_option("-o,--out", out, "Output directory")->required();

  auto* cal = app.add_subcommand("calibrate", "Find the back-wall row in an empty-scene frame");
  cal->add_option("-c,--config", config)->required();
  cal->add_option("-f,--frame", frame, "Empty-scene PGM")->required();
  cal->add_option("-o,--out", out, "Calibration file to write");

  auto* trk = app.add_subcommand("track", "Track a directory of frames");
  trk->add_option("-c,--config", config)->required();
  trk->add_option("--calibration", calibration)->required();
  trk->add_option("--frames", frames_dir, "Directory of NNNNNN.pgm frames")->required();
  trk->add_option("-o,--out", out, "Estimates CSV")->required();
  trk->add_option("--stream", stream_to, "Publish SLT1 datagrams to host:port");
  trk->add_flag("--smooth", smooth, "Enable exponential smoothing");

  auto* ev = app.add_subcommand("evaluate", "Compare estimates against ground truth");
  ev->add_option("--estimates", estimates)->required();
  ev->add_option("--truth", truth)->required();
  ev->add_option("--json", json_out, "Write metrics JSON here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Measure detection+triangulation throughput");
  bench->add_option("-c,--config", config)->required();
  bench->add_option("-n,--frames", n_frames, "Number of frames")->required();
  bench->add_option("--threads", threads, "OpenMP threads (default: runtime)");

  auto* st = app.add_subcommand("stream", "Replay an estimates CSV as SLT1 datagrams");
  st->add_option("--estimates", estimates)->required();
  st->add_option("--to", stream_to, "host:port")->required();
  st->add_flag("--realtime", realtime, "Pace packets by their timestamps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(config, out);
    if (*cal) return cmd_calibrate(config, frame, out);
    if (*trk) return cmd_track(config, calibration, frames_dir, out, stream_to, smooth);
    if (*ev) return cmd_evaluate(estimates, truth, json_out);
    if (*bench) return cmd_bench(config, n_frames, threads);
    if (*st) return cmd_stream(estimates, stream_to, realtime);
  } catch (const UsageError& e) {
    std::cerr << "slt: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "slt: config error (" << e.key() << "): " << e.what() << '\n';
    return kUsage;
  } catch (const CalibrationError& e) {
    std::cerr << "slt: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "slt: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "slt: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "slt: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
