#include "multibang/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace multibang {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string> &header) {
  for (const auto &h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (!row_start_) text_ += ',';
  row_start_ = false;
}

CsvWriter &CsvWriter::cell(double v) {
  sep();
  text_ += format_real(v);
  return *this;
}

CsvWriter &CsvWriter::cell(long long v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

CsvWriter &CsvWriter::cell(const std::string &v) {
  sep();
  text_ += v;
  return *this;
}

void CsvWriter::end_row() {
  text_ += '\n';
  row_start_ = true;
}

void CsvWriter::save(const std::filesystem::path &path) const { write_file_atomic(path, text_); }

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

} // namespace multibang
