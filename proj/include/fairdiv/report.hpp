#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "fairdiv/linalg.hpp"

namespace fairdiv {

// Deterministic JSON writer: keys stay in insertion order and every double
// is rendered with 17 significant digits, so identical runs produce
// byte-identical reports.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(std::size_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  JsonWriter& value(const std::vector<double>& v);
  JsonWriter& value(const Matrix& m);  // array of row arrays

  JsonWriter& field(const std::string& k, double v);
  JsonWriter& field(const std::string& k, int v);
  JsonWriter& field(const std::string& k, std::size_t v);
  JsonWriter& field(const std::string& k, bool v);
  JsonWriter& field(const std::string& k, const std::string& v);
  JsonWriter& field(const std::string& k, const char* v);
  JsonWriter& field(const std::string& k, const std::vector<double>& v);
  JsonWriter& field(const std::string& k, const Matrix& m);

  std::string str() const;

 private:
  void comma();
  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

std::string format_double(double v);  // 17 significant digits, shortest form

void write_text_file(const std::string& path, const std::string& content);

// CSV with header row, comma separators, LF endings.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

}  // namespace fairdiv
