#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "posauth/channel.hpp"
#include "posauth/random.hpp"
#include "posauth/scenario.hpp"

namespace posauth {

/// LQ, three ToAs, three ToA differences, current x and y.
inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::size_t kAnchorsPerFix = 3;

using FeatureVector = std::array<double, kFeatureCount>;

/// One mobility-tracking record.
struct FeatureRow {
  double lq_db = 0.0;
  std::array<double, kAnchorsPerFix> toas{};
  /// Current minus previous slot, per anchor slot; zero for a block's first row.
  std::array<double, kAnchorsPerFix> toa_diffs{};
  Vec2 current_position = Vec2::Zero();
  Vec2 label_next_position = Vec2::Zero();

  FeatureVector features() const;
};

/// Per-feature z-score statistics. The default is the identity transform.
struct Normalization {
  FeatureVector mean{};
  FeatureVector stddev{1, 1, 1, 1, 1, 1, 1, 1, 1};

  /// Statistics of the given rows. Constant features get stddev 1.
  static Normalization fit(std::span<const FeatureRow> rows);
  FeatureVector apply(std::span<const double> raw) const;
};

struct Dataset {
  std::vector<FeatureRow> rows;
  Normalization normalization;
};

struct DatasetConfig {
  double region_size = 5000.0;  // m, square side
  int rsu_count = 100;
  double range_limit = 400.0;
  double lq_min_db = 0.0;
  double lq_max_db = 20.0;
  double lq_step_db = 1.0;
  std::size_t slots_per_lq = 15000;
  double speed_min = 0.0;
  double speed_max = kMaxVehicleSpeed;
  double dt = 1.0;
  int heading_retries = 32;

  std::vector<double> lq_values() const;
};

void validate(const DatasetConfig& config);

struct GenerationReport {
  std::size_t skipped_slots = 0;   // no fix: coverage or geometry failure
  std::size_t stalled_moves = 0;   // no covered heading found, vehicle held
};

/// Uniformly deployed RSUs for the mobility region.
std::vector<Rsu> deploy_region_rsus(const DatasetConfig& config, std::uint64_t seed);

/// Simulates one trajectory per LQ value and records one row per slot; the
/// label of a row is the next slot's extracted position.
///
/// The vehicle redraws its speed uniformly every slot. A move that would leave
/// the region or the 3-RSU coverage area makes it pick a new random heading
/// (up to heading_retries times, then it holds position for that slot).
/// Slots whose fix fails are skipped and counted in the report.
Dataset generate_dataset(const DatasetConfig& config, const ChannelParams& channel,
                         std::uint64_t seed, GenerationReport* report = nullptr);

/// Shuffled partition: floor(ratio * n) rows train, the rest test. Both halves
/// carry normalization fitted on the train half. Throws if either is empty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double ratio, RandomStream& rng);

inline constexpr const char* kDatasetCsvHeader =
    "lq_db,toa1,toa2,toa3,dtoa1,dtoa2,dtoa3,x,y,label_x,label_y";

void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace posauth
