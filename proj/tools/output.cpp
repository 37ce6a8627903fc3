#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "bohm/common.hpp"

namespace bohmsim {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  if (!fs::exists(dir_, ec)) {
    fs::create_directories(dir_, ec);
    if (ec) throw bohm::ValidationError("cannot create output directory " + dir_.string() + ": " + ec.message());
    created_ = true;
  } else if (!fs::is_directory(dir_, ec)) {
    throw bohm::ValidationError("output path is not a directory: " + dir_.string());
  }
}

void OutputDir::write(std::string const& name, std::string const& content) {
  fs::path const p = dir_ / name;
  files_.push_back(p);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw bohm::Error("cannot write " + p.string());
}

void OutputDir::discard() noexcept {
  std::error_code ec;
  for (auto const& f : files_) fs::remove(f, ec);
  files_.clear();
  if (created_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
}

void Report::set(std::string const& key, std::string const& value) {
  for (auto& [k, v] : lines_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  lines_.emplace_back(key, value);
}

std::string Report::render() const {
  std::string out;
  for (auto const& [k, v] : lines_) out += k + " = " + v + "\n";
  return out;
}

namespace {

std::string quote(std::string const& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

Csv::Csv(std::string provenance, std::vector<std::string> header) : columns_(header.size()) {
  text_ = "# " + provenance + "\n";
  for (std::size_t k = 0; k < header.size(); ++k) text_ += (k ? "," : "") + header[k];
  text_ += "\n";
}

Csv& Csv::cell(std::string const& text) {
  if (filled_ == columns_) throw std::logic_error("csv: too many cells in a row");
  text_ += (filled_ ? "," : "") + quote(text);
  ++filled_;
  return *this;
}

void Csv::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv: incomplete row");
  text_ += "\n";
  filled_ = 0;
}

std::string utc_timestamp() {
  std::time_t const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace bohmsim
