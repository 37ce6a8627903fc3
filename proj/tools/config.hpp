#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohm/dirac.hpp"
#include "bohm/events.hpp"
#include "bohm/foliation.hpp"
#include "bohm/nolaw.hpp"
#include "bohm/nr_bohm.hpp"

namespace bohmsim {

using nlohmann::json;

/// Read access to one JSON object that remembers which keys were used, so
/// that leftovers can be reported as unknown.
class Section {
 public:
  Section(json const& node, std::string path);

  std::string const& path() const { return path_; }
  bool has(std::string const& key) const { return node_.contains(key); }
  std::string where(std::string const& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(std::string const& key, std::optional<double> fallback = std::nullopt);
  std::uint64_t count(std::string const& key, std::optional<std::uint64_t> fallback = std::nullopt);
  std::string text(std::string const& key, std::optional<std::string> fallback = std::nullopt);
  std::vector<double> numbers(std::string const& key, std::optional<std::vector<double>> fallback = std::nullopt);
  bohm::Interval interval(std::string const& key, std::optional<bohm::Interval> fallback = std::nullopt);
  json const& raw(std::string const& key);
  /// Missing children read as empty objects so that defaults apply.
  Section child(std::string const& key);

  /// Throws ValidationError naming every key that was never read.
  void finish() const;

 private:
  json const* lookup(std::string const& key);

  json const& node_;
  std::string path_;
  std::vector<std::string> used_;
};

struct FoliationSpec {
  std::string kind = "flat";  ///< flat | tanh | sine
  double velocity = 0.0;
  double offset = 0.0;
  bohm::CurveShape shape;
  std::string label;

  bohm::FoliationPtr build(bohm::Interval params) const;
};

struct PacketSpec {
  double center = 0.0;
  double momentum = 0.0;
  double width = 1.0;
  std::size_t modes = 64;
};

struct TermSpec {
  bohm::Complex coefficient{1.0, 0.0};
  std::vector<PacketSpec> packets;
};

struct NrConfig {
  std::vector<double> masses{1.0};
  std::vector<TermSpec> terms;
  std::string potential = "none";
  double omega = 1.0;
  bohm::nr::GridSpec grid;
  std::vector<double> initial{1.0};
  double t0 = 0.0;
  double t1 = 2.0;
  double h = 1e-3;
  std::size_t samples = 10000;
  std::size_t bins = 30;
  double velocity_scale = 1.0;

  bohm::nr::WaveFunction make() const;
};

struct DiracConfig {
  std::vector<double> masses{1.0};
  std::vector<TermSpec> terms;
  bohm::Interval normalization_window{-30.0, 30.0};

  bohm::dirac::MultiTimeWaveFunction make() const;
};

struct HbdConfig {
  double s0 = 0.0;
  double s1 = 2.0;
  double ds = 1e-3;
  std::vector<double> initial{0.0};
  double node_floor = 1e-12;
  double current_scale = 1.0;
};

struct EnsembleConfig {
  double s0 = 0.0;
  double s1 = 2.0;
  double ds = 0.02;
  std::size_t samples = 10000;
  std::size_t bins = 30;
  double failure_budget = 0.01;
  double current_scale = 1.0;
  bohm::Interval window{-30.0, 30.0};
};

struct CrossConfig {
  FoliationSpec prime;
  double s0 = -12.5;
  double s1 = 4.5;
  double s_baseline = 0.0;
  double s_prime = 0.0;
  std::size_t samples = 5000;
  std::size_t bins = 10;
  double ds = 0.02;
};

struct FamilyConfig {
  bohm::Interval params{-5.0, 5.0};
  bool use_default = true;
  std::vector<FoliationSpec> members;

  bohm::FoliationFamily build() const;
};

struct PStarConfig {
  std::size_t samples = 4000;
  double ds = 0.02;
  double epsilon = 0.02;
  std::optional<bohm::Event> event;
  bohm::CapacityEvents capacity = bohm::default_capacity_events();
};

struct CovarianceConfig {
  double boost_velocity = 0.3;
  bohm::SpacePoint translation{};
  std::size_t pstar_samples = 0;
};

struct ValidateConfig {
  std::size_t ensemble_samples = 2000;
  std::size_t pstar_samples = 300;
};

struct Config {
  json resolved;
  std::uint64_t hash = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output_dir = "bohmsim-out";
  std::string equivariance_sector = "dirac";
  NrConfig nr;
  DiracConfig dirac;
  FoliationSpec foliation;
  HbdConfig hbd;
  EnsembleConfig ensemble;
  CrossConfig cross;
  FamilyConfig family;
  PStarConfig pstar;
  CovarianceConfig covariance;
  bohm::DeformOptions overlap{1.5, 0.2, 1.0, 0.5};
  ValidateConfig validate;
};

json read_json_file(std::string const& path);

/// Applies "a.b.c=value"; the value is parsed as JSON when possible and
/// taken as a string otherwise.
void apply_override(json& doc, std::string const& assignment);

/// Strict parse with physical validation. Throws ValidationError naming the
/// offending field.
Config parse_config(json const& doc);

bohm::Event parse_event(json const& node, std::string const& path);

/// Hex FNV-1a digest of the canonical dump, without output_dir and threads.
std::string hash_text(std::uint64_t hash);

}  // namespace bohmsim
