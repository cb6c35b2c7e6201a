// Copyright 2026 The mobo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Converts a Joe-Kuo direction-number table ("d s a m_1 ... m_s" rows) into a
// C++ translation unit defining the flat arrays consumed by sampling.cpp.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " <joe-kuo-table> <output.cpp>\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 1;
  }
  std::string line;
  std::getline(in, line);  // header

  std::vector<std::uint32_t> degree, coeffs, offset, m_values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint32_t d = 0, s = 0, a = 0;
    row >> d >> s >> a;
    degree.push_back(s);
    coeffs.push_back(a);
    offset.push_back(static_cast<std::uint32_t>(m_values.size()));
    for (std::uint32_t k = 0; k < s; ++k) {
      std::uint32_t m = 0;
      row >> m;
      m_values.push_back(m);
    }
    if (!row) {
      std::cerr << "malformed row for dimension " << d << "\n";
      return 1;
    }
  }

  std::ofstream out(argv[2]);
  auto emit = [&out](const char* name, const std::vector<std::uint32_t>& v) {
    out << "extern const std::uint32_t " << name << "[] = {";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i % 24 == 0) out << "\n";
      out << v[i] << "u,";
    }
    out << "\n};\n";
  };
  out << "// Generated from the Joe-Kuo new-joe-kuo-6.21201 table. Do not edit.\n";
  out << "#include <cstdint>\n#include <cstddef>\n";
  out << "namespace mobo::qmc::detail {\n";
  out << "extern const std::size_t kDirectionTableDims = " << degree.size() + 1 << ";\n";
  emit("kDirectionDegree", degree);
  emit("kDirectionCoeffs", coeffs);
  emit("kDirectionOffset", offset);
  emit("kDirectionInit", m_values);
  out << "}  // namespace mobo::qmc::detail\n";
  return out ? 0 : 1;
}
