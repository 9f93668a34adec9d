#include "cdsim/runner.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cdsim/errors.hpp"
#include "cdsim/mie.hpp"
#include "cdsim/solver.hpp"
#include "cdsim/units.hpp"

namespace fs = std::filesystem;

namespace cdsim {

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// --- ensemble engine -------------------------------------------------------

struct RealizationResult {
  std::vector<SingleRealizationProfile> profiles;
  std::vector<double> sigma;
  std::vector<long long> singular_events;
  long long resamples = 0;
};

struct EnsembleAccumulator {
  std::vector<PolarizationProfile> profiles;
  std::vector<RunningStat> sigma;
  std::vector<long long> singular_events;
  long long resamples_total = 0;
  long long done = 0;
};

constexpr int kMaxResamples = 5;

class EnsembleEngine {
 public:
  EnsembleEngine(const RunContext& ctx, std::string mode, std::vector<double> grid,
                 bool want_profiles, bool want_sigma)
      : ctx_(ctx),
        mode_(std::move(mode)),
        grid_(std::move(grid)),
        want_profiles_(want_profiles),
        want_sigma_(want_sigma),
        hash_(config_hash_hex(ctx.config)) {
    acc_.singular_events.assign(grid_.size(), 0);
    if (want_profiles_)
      acc_.profiles.assign(grid_.size(), PolarizationProfile(ctx_.config.binning));
    if (want_sigma_) acc_.sigma.assign(grid_.size(), RunningStat{});
  }

  // Returns true when the target number of realizations has been merged,
  // false when interrupted by the cancel flag.
  bool run(RunManifest& manifest, const std::string& manifest_path) {
    const long long target = ctx_.config.realizations;
    load_checkpoint_if_any();
    const double wall_base = manifest.wall_seconds;
    const double t0 = now_seconds();
    auto sync_manifest = [&](const char* status) {
      manifest.status = status;
      manifest.realizations_completed = acc_.done;
      manifest.resamples_total = acc_.resamples_total;
      manifest.singular_events = acc_.singular_events;
      manifest.wall_seconds = wall_base + (now_seconds() - t0);
      write_manifest(manifest_path, manifest);
    };
    sync_manifest("running");
    if (acc_.done >= target) return true;

    const int workers = static_cast<int>(std::min<long long>(
        resolve_worker_count(ctx_.config), target - acc_.done));
    const long long start_done = acc_.done;
    const long long window = 4LL * workers + 4;
    const long long checkpoint_every = std::clamp(target / 32, 1LL, 512LL);

    std::atomic<long long> next{acc_.done};
    std::mutex mu;
    std::condition_variable cv_result, cv_space;
    std::map<long long, RealizationResult> pending;
    std::exception_ptr error;
    bool abort = false;
    long long merged = acc_.done;
    int active = workers;

    auto cancelled = [&] { return ctx_.cancel && ctx_.cancel->load(); };

    auto worker_fn = [&] {
      for (;;) {
        if (cancelled()) break;
        const long long i = next.fetch_add(1);
        if (i >= target) break;
        {
          // The cancel flag may be set from a signal handler, which cannot
          // notify condition variables; poll it while waiting for space.
          std::unique_lock lk(mu);
          while (!(abort || i - merged < window)) {
            cv_space.wait_for(lk, std::chrono::milliseconds(100));
            if (cancelled()) break;
          }
          if (abort || cancelled()) break;
        }
        try {
          RealizationResult r = compute(i);
          std::unique_lock lk(mu);
          pending.emplace(i, std::move(r));
          cv_result.notify_all();
        } catch (...) {
          std::unique_lock lk(mu);
          if (!error) error = std::current_exception();
          abort = true;
          cv_result.notify_all();
          cv_space.notify_all();
          break;
        }
      }
      std::unique_lock lk(mu);
      --active;
      cv_result.notify_all();
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker_fn);

    {
      std::unique_lock lk(mu);
      while (merged < target) {
        while (pending.count(merged) == 0 && active > 0)
          cv_result.wait_for(lk, std::chrono::milliseconds(100));
        if (pending.count(merged) > 0) {
          RealizationResult r = std::move(pending.at(merged));
          pending.erase(merged);
          lk.unlock();
          merge(r);
          lk.lock();
          ++merged;
          acc_.done = merged;
          cv_space.notify_all();
          if ((merged - start_done) % checkpoint_every == 0 || merged == target) {
            lk.unlock();
            save_checkpoint();
            sync_manifest("running");
            if (ctx_.log)
              (*ctx_.log) << "[" << mode_ << "] merged " << merged << "/" << target
                          << " realizations, wall " << fmt_g(manifest.wall_seconds)
                          << " s\n";
            lk.lock();
          }
        } else if (active == 0) {
          break;
        }
      }
    }
    for (auto& t : threads) t.join();

    if (error) {
      save_checkpoint();
      sync_manifest("failed");
      std::rethrow_exception(error);
    }
    save_checkpoint();
    sync_manifest(merged >= target ? "running" : "interrupted");
    return merged >= target;
  }

  const EnsembleAccumulator& accumulator() const { return acc_; }

 private:
  RealizationResult compute(long long index) const {
    const auto& cfg = ctx_.config;
    RealizationResult res;
    res.singular_events.assign(grid_.size(), 0);
    for (int salt = 0;; ++salt) {
      const CloudRealization cloud =
          sample_realization(cfg.shape, cfg.density, cfg.exclusion_radius, cfg.master_seed,
                             static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(salt));
      if (cloud.atom_count() < 1)
        throw Error("density yields zero atoms; nothing to solve");
      std::size_t at = grid_.size();
      try {
        MultiDetuningSolver solver(cloud, cfg.polarization);
        res.profiles.clear();
        res.sigma.clear();
        for (std::size_t j = 0; j < grid_.size(); ++j) {
          at = j;
          const ExcitationAmplitudes amps = solver.solve(grid_[j]);
          if (want_profiles_)
            res.profiles.push_back(bin_polarization(cloud, amps, cfg.binning));
          if (want_sigma_)
            res.sigma.push_back(
                microscopic_cross_section(cloud, amps, cfg.polarization));
        }
        res.resamples = salt;
        return res;
      } catch (const SingularMatrixError& e) {
        if (at < grid_.size()) ++res.singular_events[at];
        if (salt + 1 > kMaxResamples)
          throw SingularMatrixError("realization " + std::to_string(index) +
                                    " kept failing after " + std::to_string(kMaxResamples) +
                                    " resamples: " + e.what());
      }
    }
  }

  void merge(const RealizationResult& r) {
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      if (want_profiles_) acc_.profiles[j].accumulate(r.profiles[j]);
      if (want_sigma_) acc_.sigma[j].add(r.sigma[j]);
      acc_.singular_events[j] += r.singular_events[j];
    }
    acc_.resamples_total += r.resamples;
  }

  std::string checkpoint_path() const { return ctx_.out_dir + "/checkpoint.json"; }

  void save_checkpoint() const {
    nlohmann::json j;
    j["config_hash"] = hash_;
    j["mode"] = mode_;
    j["grid"] = grid_;
    j["done"] = acc_.done;
    j["resamples_total"] = acc_.resamples_total;
    j["singular_events"] = acc_.singular_events;
    if (want_profiles_) {
      nlohmann::json profiles = nlohmann::json::array();
      for (const auto& p : acc_.profiles) {
        nlohmann::json bins = nlohmann::json::array();
        for (const auto& b : p.raw())
          bins.push_back({b.atoms, b.n, b.mean_re, b.mean_im, b.m2_re, b.m2_im, b.c_reim});
        profiles.push_back({{"realizations", p.realizations()}, {"bins", bins}});
      }
      j["profiles"] = std::move(profiles);
    }
    if (want_sigma_) {
      nlohmann::json sig = nlohmann::json::array();
      for (const auto& s : acc_.sigma) sig.push_back({s.n, s.mean, s.m2});
      j["sigma"] = std::move(sig);
    }
    const std::string path = checkpoint_path();
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw IoError("cannot write checkpoint: " + tmp);
      out << j.dump() << "\n";
    }
    std::rename(tmp.c_str(), path.c_str());
  }

  void load_checkpoint_if_any() {
    const std::string path = checkpoint_path();
    std::ifstream in(path);
    if (!in) return;
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed checkpoint " + path + ": " + e.what());
    }
    if (j.value("config_hash", "") != hash_ || j.value("mode", "") != mode_ ||
        j.value("grid", std::vector<double>{}) != grid_)
      throw ConfigError("output directory holds a checkpoint for a different run; "
                        "use a fresh directory or delete " + path);
    acc_.done = j.at("done").get<long long>();
    acc_.resamples_total = j.at("resamples_total").get<long long>();
    acc_.singular_events = j.at("singular_events").get<std::vector<long long>>();
    if (want_profiles_) {
      const auto& profiles = j.at("profiles");
      if (profiles.size() != grid_.size())
        throw IoError("checkpoint profile count mismatch");
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        std::vector<PolarizationProfile::RawBin> bins;
        for (const auto& jb : profiles[i].at("bins")) {
          PolarizationProfile::RawBin b;
          b.atoms = jb.at(0).get<long long>();
          b.n = jb.at(1).get<long long>();
          b.mean_re = jb.at(2).get<double>();
          b.mean_im = jb.at(3).get<double>();
          b.m2_re = jb.at(4).get<double>();
          b.m2_im = jb.at(5).get<double>();
          b.c_reim = jb.at(6).get<double>();
          bins.push_back(b);
        }
        acc_.profiles[i].restore(ctx_.config.binning, std::move(bins),
                                 profiles[i].at("realizations").get<long long>());
      }
    }
    if (want_sigma_) {
      const auto& sig = j.at("sigma");
      if (sig.size() != grid_.size()) throw IoError("checkpoint sigma count mismatch");
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        acc_.sigma[i].n = sig[i].at(0).get<long long>();
        acc_.sigma[i].mean = sig[i].at(1).get<double>();
        acc_.sigma[i].m2 = sig[i].at(2).get<double>();
      }
    }
  }

  const RunContext& ctx_;
  std::string mode_;
  std::vector<double> grid_;
  bool want_profiles_;
  bool want_sigma_;
  std::string hash_;
  EnsembleAccumulator acc_;
};

RunManifest init_manifest(const std::string& mode, const RunContext& ctx,
                          const std::vector<double>& grid, long long target) {
  RunManifest m;
  m.mode = mode;
  m.config_hash = config_hash_hex(ctx.config);
  m.config_text = canonical_config_text(ctx.config);
  m.realizations_target = target;
  m.detunings = grid;
  m.singular_events.assign(grid.size(), 0);
  const std::string path = ctx.out_dir + "/manifest.json";
  if (fs::exists(path)) {
    const RunManifest prev = read_manifest(path);
    if (prev.config_hash == m.config_hash && prev.mode == mode)
      m.wall_seconds = prev.wall_seconds;  // accumulate across resumed runs
  }
  return m;
}

OpticalConstants nan_constants(double detuning) {
  OpticalConstants oc;
  const double nan = std::nan("");
  oc.detuning = detuning;
  oc.k_re = oc.k_re_err = oc.k_im = oc.k_im_err = nan;
  oc.n_re = oc.n_re_err = oc.n_im = oc.n_im_err = nan;
  oc.eps_re = oc.eps_re_err = oc.eps_im = oc.eps_im_err = nan;
  oc.alpha_re = oc.alpha_re_err = oc.alpha_im = oc.alpha_im_err = nan;
  oc.ioffe_regel = oc.ioffe_regel_err = nan;
  oc.r2_amplitude = oc.r2_phase = nan;
  return oc;
}

void write_dispersion_csv(const std::string& path, const RunContext& ctx,
                          const std::vector<DispersionRow>& rows, long long realizations) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# cdsim dispersion results\n";
  out << "# version=" << kVersion << " config_hash=" << config_hash_hex(ctx.config) << "\n";
  out << "delta,k_re,k_re_err,k_im,k_im_err,n_re,n_re_err,n_im,n_im_err,"
         "eps_re,eps_re_err,eps_im,eps_im_err,alpha_re,alpha_re_err,alpha_im,alpha_im_err,"
         "ioffe_regel,ioffe_regel_err,ioffe_regel_defined,r2_amplitude,r2_phase,bins_used,"
         "realizations,singular_events\n";
  for (const auto& row : rows) {
    const auto& c = row.constants;
    const double nan = std::nan("");
    out << fmt_g(c.detuning) << ',' << fmt_g(c.k_re) << ',' << fmt_g(c.k_re_err) << ','
        << fmt_g(c.k_im) << ',' << fmt_g(c.k_im_err) << ',' << fmt_g(c.n_re) << ','
        << fmt_g(c.n_re_err) << ',' << fmt_g(c.n_im) << ',' << fmt_g(c.n_im_err) << ','
        << fmt_g(c.eps_re) << ',' << fmt_g(c.eps_re_err) << ',' << fmt_g(c.eps_im) << ','
        << fmt_g(c.eps_im_err) << ',' << fmt_g(c.alpha_re) << ',' << fmt_g(c.alpha_re_err)
        << ',' << fmt_g(c.alpha_im) << ',' << fmt_g(c.alpha_im_err) << ','
        << fmt_g(c.ioffe_regel_defined ? c.ioffe_regel : nan) << ','
        << fmt_g(c.ioffe_regel_defined ? c.ioffe_regel_err : nan) << ','
        << (c.ioffe_regel_defined ? 1 : 0) << ',' << fmt_g(c.r2_amplitude) << ','
        << fmt_g(c.r2_phase) << ',' << c.bins_used << ',' << realizations << ','
        << row.singular_events << "\n";
  }
}

}  // namespace

int resolve_worker_count(const SimulationConfig& config) {
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("CDSIM_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

RunOutcome run_dispersion(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  cfg.validate();
  fs::create_directories(ctx.out_dir);
  const std::vector<double> grid = cfg.detuning_grid();
  const std::string manifest_path = ctx.out_dir + "/manifest.json";

  RunManifest manifest = init_manifest("dispersion", ctx, grid, cfg.realizations);
  EnsembleEngine engine(ctx, "dispersion", grid, /*want_profiles=*/true,
                        /*want_sigma=*/false);
  const bool complete = engine.run(manifest, manifest_path);
  const auto& acc = engine.accumulator();

  RunOutcome out;
  out.interrupted = !complete;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    DispersionRow row;
    row.singular_events = acc.singular_events[j];
    try {
      const ComplexWavenumber k =
          fit_wavenumber(acc.profiles[j], cfg.window, cfg.weighted_fit);
      row.constants = derive_optical_constants(grid[j], k, cfg.density);
    } catch (const FitError& e) {
      row.fit_failed = true;
      row.constants = nan_constants(grid[j]);
      manifest.notes.push_back("fit failed at detuning " + fmt_g(grid[j]) + ": " + e.what());
    }
    out.dispersion.push_back(row);
  }
  write_dispersion_csv(ctx.out_dir + "/dispersion.csv", ctx, out.dispersion, acc.done);

  manifest.status = complete ? "complete" : "interrupted";
  write_manifest(manifest_path, manifest);
  out.manifest = manifest;
  return out;
}

RunOutcome run_profile_dump(const RunContext& ctx, double detuning) {
  const auto& cfg = ctx.config;
  cfg.validate();
  fs::create_directories(ctx.out_dir);
  const std::vector<double> grid{detuning};
  const std::string manifest_path = ctx.out_dir + "/manifest.json";

  RunManifest manifest = init_manifest("profile", ctx, grid, cfg.realizations);
  EnsembleEngine engine(ctx, "profile", grid, /*want_profiles=*/true, /*want_sigma=*/false);
  const bool complete = engine.run(manifest, manifest_path);

  const std::string path = ctx.out_dir + "/profile.csv";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "# cdsim polarization profile, detuning=" << fmt_g(detuning) << "\n";
  os << "# version=" << kVersion << " config_hash=" << config_hash_hex(cfg) << "\n";
  write_profile_csv(os, engine.accumulator().profiles[0]);

  RunOutcome out;
  out.interrupted = !complete;
  manifest.status = complete ? "complete" : "interrupted";
  write_manifest(manifest_path, manifest);
  out.manifest = manifest;
  return out;
}

void run_profile_inject(const RunContext& ctx, const std::string& inject_path) {
  const auto& cfg = ctx.config;
  cfg.validate();
  fs::create_directories(ctx.out_dir);

  std::ifstream in(inject_path);
  if (!in) throw IoError("cannot open injected profile: " + inject_path);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (header.empty())
      header = std::move(fields);
    else
      rows.push_back(std::move(fields));
  }
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<long>(i);
    return -1L;
  };
  const long zc = column("z_center"), rc = column("re_P"), ic = column("im_P");
  const long cc = column("count");
  if (zc < 0 || rc < 0 || ic < 0)
    throw ConfigError("injected profile needs z_center, re_P, im_P columns");

  const BinningSpec spec = cfg.binning;
  if (static_cast<int>(rows.size()) != spec.bin_count())
    throw ConfigError("injected profile has " + std::to_string(rows.size()) +
                      " bins, config expects " + std::to_string(spec.bin_count()));

  std::vector<PolarizationProfile::RawBin> bins(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double z = std::stod(rows[i][zc]);
    if (std::abs(z - spec.bin_center(static_cast<int>(i))) > 1e-9)
      throw ConfigError("injected profile bin centers do not match the config binning");
    const double re = std::stod(rows[i][rc]);
    const double im = std::stod(rows[i][ic]);
    if (std::isnan(re) || std::isnan(im)) continue;  // empty bin stays empty
    bins[i].n = 1;
    bins[i].atoms = cc >= 0 ? std::stoll(rows[i][cc]) : 1;
    bins[i].mean_re = re;
    bins[i].mean_im = im;
  }
  PolarizationProfile profile(spec);
  profile.restore(spec, std::move(bins), 1);

  const std::string path = ctx.out_dir + "/profile.csv";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "# cdsim polarization profile (injected)\n";
  os << "# version=" << kVersion << " config_hash=" << config_hash_hex(cfg) << "\n";
  write_profile_csv(os, profile);
}

std::vector<PermittivityEntry> read_permittivity_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open permittivity table: " + path);
  std::string line;
  std::vector<std::string> header;
  std::vector<PermittivityEntry> out;
  long dc = -1, rc = -1, ic = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "delta") dc = static_cast<long>(i);
        if (header[i] == "eps_re") rc = static_cast<long>(i);
        if (header[i] == "eps_im") ic = static_cast<long>(i);
      }
      if (dc < 0 || rc < 0 || ic < 0)
        throw ConfigError("permittivity table needs delta, eps_re, eps_im columns: " + path);
      continue;
    }
    PermittivityEntry e;
    e.detuning = std::stod(fields[dc]);
    e.eps = Complex(std::stod(fields[rc]), std::stod(fields[ic]));
    out.push_back(e);
  }
  if (out.empty()) throw ConfigError("permittivity table is empty: " + path);
  return out;
}

RunOutcome run_mie_compare(const RunContext& ctx, const std::string& permittivity_table) {
  const auto& cfg = ctx.config;
  cfg.validate();
  if (!cfg.shape.is_sphere())
    throw ConfigError("mie-compare requires a spherical cloud");
  if (permittivity_table.empty())
    throw ConfigError("mie-compare requires a permittivity table (--permittivity-table)");
  fs::create_directories(ctx.out_dir);

  const std::vector<double> grid = cfg.detuning_grid();
  const std::vector<PermittivityEntry> table = read_permittivity_table(permittivity_table);

  // Resolve the Mie side first so table problems surface before the solve.
  std::vector<double> sigma_mie(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const PermittivityEntry* entry = nullptr;
    for (const auto& e : table)
      if (std::abs(e.detuning - grid[j]) <= 1e-8) entry = &e;
    if (!entry)
      throw ConfigError("permittivity table has no entry for detuning " + fmt_g(grid[j]));
    Complex m = std::sqrt(entry->eps);
    if (m.imag() < 0.0) m = -m;  // branch with Im m >= 0
    MieInput input;
    input.radius = cfg.shape.as_sphere().radius;
    input.refractive_index = m;
    sigma_mie[j] = mie_extinction(input);
  }

  const std::string manifest_path = ctx.out_dir + "/manifest.json";
  RunManifest manifest = init_manifest("mie-compare", ctx, grid, cfg.realizations);
  EnsembleEngine engine(ctx, "mie-compare", grid, /*want_profiles=*/false,
                        /*want_sigma=*/true);
  const bool complete = engine.run(manifest, manifest_path);
  const auto& acc = engine.accumulator();

  RunOutcome out;
  out.interrupted = !complete;
  const std::string path = ctx.out_dir + "/mie_compare.csv";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "# cdsim microscopic vs Debye-Mie extinction\n";
  os << "# version=" << kVersion << " config_hash=" << config_hash_hex(cfg) << "\n";
  os << "delta,sigma_microscopic,sigma_microscopic_stderr,sigma_mie,rel_diff\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    MieComparisonRow row;
    row.detuning = grid[j];
    row.sigma_microscopic = acc.sigma[j].mean;
    row.sigma_microscopic_stderr = acc.sigma[j].stderr_mean();
    row.sigma_mie = sigma_mie[j];
    row.rel_diff = sigma_mie[j] != 0.0
                       ? (row.sigma_microscopic - sigma_mie[j]) / sigma_mie[j]
                       : std::nan("");
    os << fmt_g(row.detuning) << ',' << fmt_g(row.sigma_microscopic) << ','
       << fmt_g(row.sigma_microscopic_stderr) << ',' << fmt_g(row.sigma_mie) << ','
       << fmt_g(row.rel_diff) << "\n";
    out.mie.push_back(row);
  }

  manifest.status = complete ? "complete" : "interrupted";
  write_manifest(manifest_path, manifest);
  out.manifest = manifest;
  return out;
}

double run_single_atom(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  fs::create_directories(ctx.out_dir);
  const std::vector<double> grid = cfg.detuning_grid();

  CloudRealization atom;
  atom.positions.push_back(Eigen::Vector3d::Zero());

  const std::string path = ctx.out_dir + "/single_atom.csv";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "# cdsim single-atom spectrum check\n";
  os << "delta,abs_b2,abs_b2_analytic,sigma,sigma_analytic\n";

  const double g = units::gamma0;
  double max_rel_err = 0.0;
  for (const double delta : grid) {
    const LinearSystem sys = assemble_system(atom, DriveField{delta, cfg.polarization});
    const ExcitationAmplitudes amps = solve_amplitudes(sys);
    const double b2 = std::norm(amps.b(zeeman_index(cfg.polarization)));
    const double b2_ref = 1.0 / (delta * delta + 0.25 * g * g);
    const double sigma = microscopic_cross_section(atom, amps, cfg.polarization);
    const double sigma_ref = 6.0 * std::numbers::pi / (units::k0 * units::k0) *
                             (0.25 * g * g) / (delta * delta + 0.25 * g * g);
    max_rel_err = std::max(max_rel_err, std::abs(b2 - b2_ref) / b2_ref);
    max_rel_err = std::max(max_rel_err, std::abs(sigma - sigma_ref) / sigma_ref);
    os << fmt_g(delta) << ',' << fmt_g(b2) << ',' << fmt_g(b2_ref) << ',' << fmt_g(sigma)
       << ',' << fmt_g(sigma_ref) << "\n";
  }

  RunManifest manifest = init_manifest("single-atom", ctx, grid, 1);
  manifest.realizations_completed = 1;
  manifest.status = "complete";
  write_manifest(ctx.out_dir + "/manifest.json", manifest);
  return max_rel_err;
}

CostEstimate estimate_cost(const SimulationConfig& config) {
  CostEstimate est;
  est.atoms = atom_count(config.shape, config.density);
  est.dimension = 3 * est.atoms;
  est.detunings = static_cast<long long>(config.detuning_grid().size());
  est.systems = est.detunings * config.realizations;
  const double n = static_cast<double>(est.dimension);
  est.matrix_gib = 3.0 * n * n * 16.0 / (1024.0 * 1024.0 * 1024.0);
  // one complex multiply-add ~ 8 real flops
  const double reduction = 8.0 * (10.0 / 3.0) * n * n * n;
  const double per_shift = 8.0 * 6.0 * n * n;
  est.reduction_gflop = static_cast<double>(config.realizations) * reduction / 1e9;
  est.solve_gflop = static_cast<double>(est.systems) * per_shift / 1e9;
  const double kCalibrationGflops = 25.0;  // measured dense-kernel throughput
  est.est_hours_single_worker =
      (est.reduction_gflop + est.solve_gflop) / kCalibrationGflops / 3600.0;
  return est;
}

void print_cost_estimate(std::ostream& os, const SimulationConfig& config) {
  const CostEstimate est = estimate_cost(config);
  os << "atoms per realization: " << est.atoms << " (system dimension " << est.dimension
     << ")\n"
     << "detunings: " << est.detunings << ", realizations: " << config.realizations
     << ", linear systems: " << est.systems << "\n"
     << "resident matrices per worker: " << fmt_g(est.matrix_gib) << " GiB\n"
     << "work: " << fmt_g(est.reduction_gflop) << " Gflop reductions + "
     << fmt_g(est.solve_gflop) << " Gflop shifted solves\n"
     << "estimated wall: " << fmt_g(est.est_hours_single_worker) << " h on one worker, "
     << fmt_g(est.est_hours_single_worker / resolve_worker_count(config)) << " h on "
     << resolve_worker_count(config) << "\n";
}

}  // namespace cdsim
