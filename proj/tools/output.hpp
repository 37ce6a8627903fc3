#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bohmsim {

std::string format_double(double v);

/// Files written by one run. Everything registered here is deleted again by
/// discard(), together with the directory if the run created it.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  std::filesystem::path const& path() const { return dir_; }
  void write(std::string const& name, std::string const& content);
  void discard() noexcept;

 private:
  std::filesystem::path dir_;
  bool created_ = false;
  std::vector<std::filesystem::path> files_;
};

/// Ordered "key = value" lines.
class Report {
 public:
  void set(std::string const& key, std::string const& value);
  void set(std::string const& key, char const* value) { set(key, std::string(value)); }
  void set(std::string const& key, double value) { set(key, format_double(value)); }
  void set(std::string const& key, std::uint64_t value) { set(key, std::to_string(value)); }
  void set(std::string const& key, bool value) { set(key, std::string(value ? "true" : "false")); }

  std::string render() const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

/// CSV text with a leading "# key=value" provenance comment and a header.
class Csv {
 public:
  Csv(std::string provenance, std::vector<std::string> header);

  Csv& cell(std::string const& text);
  Csv& cell(double v) { return cell(format_double(v)); }
  Csv& cell(std::uint64_t v) { return cell(std::to_string(v)); }
  void end_row();

  std::string const& str() const { return text_; }

 private:
  std::string text_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

std::string utc_timestamp();

}  // namespace bohmsim
