#pragma once

#include <string>

#include "hte/frame.hpp"

namespace hte {

struct CsvOptions {
  enum class Impute { none, mean };
  // Cell content (after unquoting) that marks a missing value.
  std::string missing_marker = "";
  Impute impute = Impute::none;
};

// RFC-4180-style reader: mandatory header row, quoted fields with doubled
// quotes, LF or CRLF line endings. Every data cell must parse as a double or
// equal the missing marker; missing cells are replaced by the column mean
// when impute == mean and are an error otherwise.
FrameTable load_csv(const std::string& path, const CsvOptions& options = {});

void write_table_csv(const std::string& path, const FrameTable& table);

}  // namespace hte
