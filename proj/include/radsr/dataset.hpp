#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/radar_sim.hpp"
#include "radsr/spectral.hpp"

namespace radsr {

struct SubjectSpec {
  std::string subject_id;
  GaitModel gait;
  std::uint64_t rng_seed = 0;
};

/// Deterministic synthetic walkers: torso, thighs, shins, feet and arms with
/// opposite-side limbs in antiphase and a per-subject left/right asymmetry on
/// the odd harmonics.
std::vector<SubjectSpec> synthesize_population(std::size_t n_subjects, std::uint64_t seed);

nlohmann::json gait_to_json(const GaitModel& g);

enum class Side { left, right };
std::string to_string(Side s);

struct IqSegment {
  IqSeries iq;
  std::size_t index = 0;  // half-gait number k, boundaries at k / (2 cadence)
  Side side = Side::left;
  double t_begin_s = 0.0;
  double t_end_s = 0.0;
};

/// Splits at the analytic zero-phase instants t_k = k / (2 cadence). Even k is
/// a left half, odd k a right half. Sample i belongs to the segment whose
/// interval contains i / fs.
std::vector<IqSegment> segment_half_gaits(const IqSeries& iq, const GaitModel& gait);

struct CorpusConfig {
  std::size_t n_subjects = 8;
  std::size_t n_test_subjects = 2;
  std::size_t halves_per_subject = 40;
  std::size_t image_rows = 64;  // time
  std::size_t image_cols = 64;  // velocity
  CwRadarConfig radar;          // duration is derived per subject
  std::size_t decimation = 4;
  StftParams stft;
  double crop_mps = 6.0;
  double floor_percentile = 5.0;
  double ceil_percentile = 99.9;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json to_json(const CorpusConfig& c);
CorpusConfig corpus_config_from_json(const nlohmann::json& j, CorpusConfig base = {});

/// Time range simulated per subject so both spectrograms fully cover every
/// half gait: the first used boundary and the total duration.
struct SubjectTimeline {
  std::size_t first_half = 0;
  double duration_s = 0.0;
};
SubjectTimeline subject_timeline(const GaitModel& gait, const CorpusConfig& cfg);

struct PairSpectra {
  std::size_t index = 0;  // 0-based half gait within the subject
  Side side = Side::left;
  Spectrum2D lo;  // f_p spectrogram cropped to +/- crop_mps, on the common grid
  Spectrum2D hi;  // decimated spectrogram, on the common grid
};

/// All half-gait pairs of one subject, on the common (time, velocity) grid.
std::vector<PairSpectra> subject_pairs(const SubjectSpec& subject, const CorpusConfig& cfg);

struct PairRecord {
  std::string subject_id;
  std::size_t index = 0;
  Side side = Side::left;
  std::string acquisition_id;
  std::string lo_path;  // relative to the manifest directory
  std::string hi_path;
  std::string lo_sha256;
  std::string hi_sha256;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  std::vector<std::string> train_subjects;
  std::vector<std::string> test_subjects;
  std::vector<PairRecord> train;
  std::vector<PairRecord> test;
  bool has_normalization = false;
  double db_floor = 0.0;
  double db_ceil = 0.0;
  bool dry_run = false;
  nlohmann::json config;
  nlohmann::json subjects;  // per-subject gait parameters and seeds
};

nlohmann::json to_json(const SplitManifest& m);
SplitManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const SplitManifest& m, const std::filesystem::path& path);
SplitManifest load_manifest(const std::filesystem::path& path);

/// Subject-disjoint split: a seeded shuffle, first n_test become test.
/// Both lists come back sorted.
void split_subjects(const std::vector<std::string>& ids, std::size_t n_test, std::uint64_t seed,
                    std::vector<std::string>& train, std::vector<std::string>& test);

using ProgressFn = std::function<void(double fraction)>;

/// Writes `<corpus_dir>/{train,test}/<subject>/<index>_{lo,hi}.png` (+ .json
/// sidecars) and `<corpus_dir>/manifest.json`. A dry run only plans the
/// split and file names. Subjects are simulated on RADSR_THREADS workers.
SplitManifest build_corpus(const std::vector<SubjectSpec>& population, const CorpusConfig& cfg,
                           const std::filesystem::path& corpus_dir, bool dry_run = false,
                           const ProgressFn& progress = {});

struct VerifyReport {
  bool ok = true;
  std::size_t pairs_checked = 0;
  std::vector<std::string> violations;
};

/// `root` is the directory the manifest's relative paths resolve against.
VerifyReport verify_corpus(const SplitManifest& m, const std::filesystem::path& root);

/// Worker count from RADSR_THREADS (default 1).
std::size_t worker_threads();

}  // namespace radsr
