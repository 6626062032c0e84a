#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace alrl {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Small CSV builder. Fields are written verbatim; callers keep them free of
/// commas and quotes.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> fields);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Line chart with axes, ticks, and a legend. Output depends only on the
/// arguments, so equal inputs give byte-identical files.
std::string render_svg_line_chart(std::span<const ChartSeries> series,
                                  const ChartOptions& options = {});
void emit_svg_line_chart(std::span<const ChartSeries> series, const std::filesystem::path& path,
                         const ChartOptions& options = {});

/// Writes text to `path`, replacing any existing file.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Tracks files produced by a run. Unless commit() is called, the destructor
/// deletes them so a failed run leaves no half-written outputs behind.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir);
  ArtifactSet(const ArtifactSet&) = delete;
  ArtifactSet& operator=(const ArtifactSet&) = delete;
  ~ArtifactSet();

  /// Path inside the output directory, recorded for cleanup.
  std::filesystem::path add(const std::string& name);
  void commit() noexcept { committed_ = true; }

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

}  // namespace alrl
