/*
 * Copyright 2026 The ShieldFL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "shieldfl/report.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace shieldfl {

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string RoundCsvRow(const RoundReport& r) {
  std::string s = std::to_string(r.round);
  for (double v : {r.accuracy, 100.0 * r.ratios.enc, 100.0 * r.ratios.pers,
                   100.0 * r.ratios.noise, r.timings.train, r.timings.encrypt,
                   r.timings.aggregate, r.timings.decrypt, r.privacy.eps,
                   r.privacy.alpha}) {
    s += ",";
    s += FormatNumber(v);
  }
  return s;
}

std::string PrivacyCsvRow(const RoundReport& r) {
  return std::to_string(r.round) + "," + FormatNumber(r.privacy.alpha) + "," +
         FormatNumber(r.privacy.eps_rdp) + "," + FormatNumber(r.privacy.eps) +
         "," + FormatNumber(r.delta);
}

std::string AttackCsvRow(const ClientAttackMetrics& m) {
  return std::to_string(m.round) + "," + std::to_string(m.client) + "," +
         FormatNumber(m.le_acc) + "," + FormatNumber(m.ln_acc) + "," +
         FormatNumber(m.idlg_mse) + "," + FormatNumber(m.visible_fraction);
}

void WriteRoundCsv(std::ostream& out, const std::vector<RoundReport>& reports) {
  out << kRoundCsvHeader << "\n";
  for (const auto& r : reports) out << RoundCsvRow(r) << "\n";
}

void WritePrivacyCsv(std::ostream& out,
                     const std::vector<RoundReport>& reports) {
  out << kPrivacyCsvHeader << "\n";
  for (const auto& r : reports) out << PrivacyCsvRow(r) << "\n";
}

void WriteAttackCsv(std::ostream& out,
                    const std::vector<ClientAttackMetrics>& rows) {
  out << kAttackCsvHeader << "\n";
  for (const auto& m : rows) out << AttackCsvRow(m) << "\n";
}

}  // namespace shieldfl
