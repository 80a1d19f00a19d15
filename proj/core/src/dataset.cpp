#include "posauth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "posauth/error.hpp"
#include "posauth/localizer.hpp"
#include "posauth/parallel.hpp"
#include "posauth/text.hpp"

namespace posauth {

namespace {

constexpr std::uint64_t kDeployTag = 0x5253550000000001ULL;
constexpr std::uint64_t kBlockTag = 0x424c4b0000000002ULL;
constexpr std::uint64_t kNoiseTag = 0x4e4f490000000003ULL;

struct Fix {
  std::array<double, kAnchorsPerFix> toas{};
  Vec2 position = Vec2::Zero();
};

std::size_t count_in_range(std::span<const Rsu> rsus, const Vec2& p, double limit) {
  std::size_t n = 0;
  for (const Rsu& r : rsus) {
    if ((r.position - p).norm() < limit) ++n;
  }
  return n;
}

bool inside_region(const Vec2& p, double size) {
  return p.x() >= 0.0 && p.x() <= size && p.y() >= 0.0 && p.y() <= size;
}

Vec2 random_heading(RandomStream& rng) {
  const double angle = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return Vec2(std::cos(angle), std::sin(angle));
}

std::vector<FeatureRow> simulate_block(const DatasetConfig& cfg, const ChannelParams& channel,
                                       std::span<const Rsu> rsus, double lq_db,
                                       std::uint64_t block_seed, GenerationReport& report) {
  RandomStream rng(block_seed);
  const LinkQuality lq{lq_db};
  const std::size_t need = cfg.slots_per_lq + 1;

  Vec2 pos;
  int attempts = 0;
  do {
    if (++attempts > 100000) {
      throw InsufficientCoverage("no start position with 3 RSUs in range was found");
    }
    pos = Vec2(uniform(rng, 0.0, cfg.region_size), uniform(rng, 0.0, cfg.region_size));
  } while (count_in_range(rsus, pos, cfg.range_limit) < kAnchorsPerFix);
  Vec2 heading = random_heading(rng);

  std::vector<Fix> fixes;
  fixes.reserve(need);
  std::uint64_t slot = 0;
  const std::size_t max_slots = need * 10 + 1000;
  while (fixes.size() < need) {
    if (slot >= max_slots) {
      throw InsufficientCoverage("too many slots without a position fix");
    }
    try {
      const auto anchors = select_rsus(rsus, cfg.range_limit, pos, kAnchorsPerFix);
      std::array<ToaObservation, kAnchorsPerFix> toas;
      for (std::size_t j = 0; j < kAnchorsPerFix; ++j) {
        RandomStream noise = make_stream(block_seed, {kNoiseTag, slot, j});
        toas[j] = observe_toa(noise, anchors[j], pos, lq, channel);
      }
      const PositionEstimate est = locate(anchors, toas, channel);
      Fix f;
      for (std::size_t j = 0; j < kAnchorsPerFix; ++j) f.toas[j] = toas[j].toa;
      f.position = est.position;
      fixes.push_back(f);
    } catch (const InsufficientCoverage&) {
      ++report.skipped_slots;
    } catch (const DegenerateGeometry&) {
      ++report.skipped_slots;
    }

    const double speed = uniform(rng, cfg.speed_min, cfg.speed_max);
    bool moved = false;
    for (int attempt = 0; attempt <= cfg.heading_retries; ++attempt) {
      if (attempt > 0) heading = random_heading(rng);
      const Vec2 candidate = pos + speed * cfg.dt * heading;
      if (inside_region(candidate, cfg.region_size) &&
          count_in_range(rsus, candidate, cfg.range_limit) >= kAnchorsPerFix) {
        pos = candidate;
        moved = true;
        break;
      }
    }
    if (!moved) ++report.stalled_moves;
    ++slot;
  }

  std::vector<FeatureRow> rows;
  rows.reserve(cfg.slots_per_lq);
  for (std::size_t i = 0; i + 1 < fixes.size(); ++i) {
    FeatureRow row;
    row.lq_db = lq_db;
    row.toas = fixes[i].toas;
    for (std::size_t j = 0; j < kAnchorsPerFix; ++j) {
      row.toa_diffs[j] = i == 0 ? 0.0 : fixes[i].toas[j] - fixes[i - 1].toas[j];
    }
    row.current_position = fixes[i].position;
    row.label_next_position = fixes[i + 1].position;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

FeatureVector FeatureRow::features() const {
  return {lq_db,        toas[0],      toas[1],      toas[2],           toa_diffs[0],
          toa_diffs[1], toa_diffs[2], current_position.x(), current_position.y()};
}

Normalization Normalization::fit(std::span<const FeatureRow> rows) {
  Normalization n;
  if (rows.empty()) return n;
  const double count = static_cast<double>(rows.size());
  FeatureVector sum{};
  for (const FeatureRow& r : rows) {
    const FeatureVector f = r.features();
    for (std::size_t k = 0; k < kFeatureCount; ++k) sum[k] += f[k];
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) n.mean[k] = sum[k] / count;
  FeatureVector sq{};
  for (const FeatureRow& r : rows) {
    const FeatureVector f = r.features();
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double d = f[k] - n.mean[k];
      sq[k] += d * d;
    }
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double sd = std::sqrt(sq[k] / count);
    n.stddev[k] = sd > 0.0 ? sd : 1.0;
  }
  return n;
}

FeatureVector Normalization::apply(std::span<const double> raw) const {
  if (raw.size() != kFeatureCount) {
    throw InvalidArgument("expected " + std::to_string(kFeatureCount) + " features, got " +
                          std::to_string(raw.size()));
  }
  FeatureVector out;
  for (std::size_t k = 0; k < kFeatureCount; ++k) out[k] = (raw[k] - mean[k]) / stddev[k];
  return out;
}

std::vector<double> DatasetConfig::lq_values() const {
  std::vector<double> values;
  const auto steps = static_cast<long>(std::floor((lq_max_db - lq_min_db) / lq_step_db + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    values.push_back(lq_min_db + static_cast<double>(i) * lq_step_db);
  }
  return values;
}

void validate(const DatasetConfig& c) {
  if (!(c.region_size > 0.0)) throw InvalidArgument("dataset region size must be positive");
  if (c.rsu_count < static_cast<int>(kAnchorsPerFix)) {
    throw InvalidArgument("dataset needs at least 3 RSUs");
  }
  if (!(c.range_limit > 0.0)) throw InvalidArgument("dataset range limit must be positive");
  if (!(c.lq_step_db > 0.0) || c.lq_max_db < c.lq_min_db) {
    throw InvalidArgument("dataset LQ range is empty");
  }
  if (c.slots_per_lq == 0) throw InvalidArgument("slots_per_lq must be positive");
  if (!(c.speed_min >= 0.0) || c.speed_max > kMaxVehicleSpeed || c.speed_max < c.speed_min) {
    throw InvalidArgument("dataset speed range must lie within [0, 33] m/s");
  }
  if (!(c.dt > 0.0)) throw InvalidArgument("dataset time step must be positive");
  if (c.heading_retries < 0) throw InvalidArgument("heading_retries must be non-negative");
}

std::vector<Rsu> deploy_region_rsus(const DatasetConfig& config, std::uint64_t seed) {
  RandomStream rng = make_stream(seed, {kDeployTag});
  std::vector<Rsu> rsus;
  rsus.reserve(static_cast<std::size_t>(config.rsu_count));
  for (int i = 0; i < config.rsu_count; ++i) {
    const double x = uniform(rng, 0.0, config.region_size);
    const double y = uniform(rng, 0.0, config.region_size);
    rsus.push_back(Rsu{i, Vec2(x, y)});
  }
  return rsus;
}

Dataset generate_dataset(const DatasetConfig& config, const ChannelParams& channel,
                         std::uint64_t seed, GenerationReport* report) {
  validate(config);
  validate(channel);
  const std::vector<Rsu> rsus = deploy_region_rsus(config, seed);
  const std::vector<double> lqs = config.lq_values();

  std::vector<std::vector<FeatureRow>> blocks(lqs.size());
  std::vector<GenerationReport> reports(lqs.size());
  parallel_for(lqs.size(), [&](std::size_t b) {
    blocks[b] = simulate_block(config, channel, rsus, lqs[b], derive_seed(seed, {kBlockTag, b}),
                               reports[b]);
  });

  Dataset ds;
  ds.rows.reserve(lqs.size() * config.slots_per_lq);
  GenerationReport total;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    ds.rows.insert(ds.rows.end(), blocks[b].begin(), blocks[b].end());
    total.skipped_slots += reports[b].skipped_slots;
    total.stalled_moves += reports[b].stalled_moves;
  }
  ds.normalization = Normalization::fit(ds.rows);
  if (report != nullptr) *report = total;
  return ds;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double ratio, RandomStream& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("split ratio must lie strictly between 0 and 1");
  }
  const std::size_t n = dataset.rows.size();
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw InvalidArgument("split of " + std::to_string(n) + " rows at ratio " +
                          format_double(ratio) + " leaves an empty side");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  Dataset train;
  Dataset test;
  train.rows.reserve(n_train);
  test.rows.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).rows.push_back(dataset.rows[order[i]]);
  }
  train.normalization = Normalization::fit(train.rows);
  test.normalization = train.normalization;
  return {std::move(train), std::move(test)};
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  out << kDatasetCsvHeader << '\n';
  for (const FeatureRow& r : dataset.rows) {
    const FeatureVector f = r.features();
    for (double v : f) out << format_double(v) << ',';
    out << format_double(r.label_next_position.x()) << ','
        << format_double(r.label_next_position.y()) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_dataset_csv(out, dataset);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kDatasetCsvHeader) {
    throw IoError(std::string("dataset header must be '") + kDatasetCsvHeader + "'");
  }
  Dataset ds;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != kFeatureCount + 2) {
      throw IoError("dataset line " + std::to_string(line_no) + ": expected 11 columns, got " +
                    std::to_string(cells.size()));
    }
    std::array<double, kFeatureCount + 2> v{};
    try {
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = parse_double(cells[k]);
    } catch (const InvalidArgument& e) {
      throw IoError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw IoError("dataset line " + std::to_string(line_no) + ": non-finite value");
      }
    }
    FeatureRow r;
    r.lq_db = v[0];
    r.toas = {v[1], v[2], v[3]};
    r.toa_diffs = {v[4], v[5], v[6]};
    r.current_position = Vec2(v[7], v[8]);
    r.label_next_position = Vec2(v[9], v[10]);
    ds.rows.push_back(r);
  }
  ds.normalization = Normalization::fit(ds.rows);
  return ds;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset '" + path.string() + "'");
  return read_dataset_csv(in);
}

}  // namespace posauth
