#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace multibang {

/// Row-oriented CSV text builder. Reals are printed with %.17g so that
/// output is round-trip exact and byte-stable.
class CsvWriter {
public:
  explicit CsvWriter(const std::vector<std::string> &header);

  CsvWriter &cell(double v);
  CsvWriter &cell(long long v);
  CsvWriter &cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter &cell(const std::string &v);
  void end_row();

  const std::string &text() const { return text_; }
  /// Writes via a temporary file in the same directory and a rename.
  void save(const std::filesystem::path &path) const;

private:
  void sep();
  std::string text_;
  bool row_start_ = true;
};

std::string format_real(double v);
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

} // namespace multibang
