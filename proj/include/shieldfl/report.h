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
#ifndef SHIELDFL_REPORT_H_
#define SHIELDFL_REPORT_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "shieldfl/attack.h"
#include "shieldfl/protocol.h"

namespace shieldfl {

inline constexpr std::string_view kRoundCsvHeader =
    "round,acc,m_enc_pct,m_pers_pct,m_noise_pct,t_train_s,t_encrypt_s,"
    "t_aggregate_s,t_decrypt_s,eps_dp,alpha_star";
inline constexpr std::string_view kSweepCsvHeader =
    "round,acc,m_enc_pct,m_pers_pct,m_noise_pct,t_train_s,t_encrypt_s,"
    "t_aggregate_s,t_decrypt_s,eps_dp,alpha_star,tau,rho";
inline constexpr std::string_view kPrivacyCsvHeader =
    "T,alpha_star,eps_rdp,eps_dp,delta";
inline constexpr std::string_view kAttackCsvHeader =
    "round,client,le_acc,ln_acc,idlg_mse,visible_fraction";

// Columns 6-9 of a round row hold wall-clock timings.
inline constexpr std::size_t kFirstTimingColumn = 5;
inline constexpr std::size_t kTimingColumns = 4;

// Shortest round-trip decimal form; "inf" and "nan" for non-finite values.
std::string FormatNumber(double v);

std::string RoundCsvRow(const RoundReport& r);
std::string PrivacyCsvRow(const RoundReport& r);
std::string AttackCsvRow(const ClientAttackMetrics& m);

void WriteRoundCsv(std::ostream& out, const std::vector<RoundReport>& reports);
void WritePrivacyCsv(std::ostream& out,
                     const std::vector<RoundReport>& reports);
void WriteAttackCsv(std::ostream& out,
                    const std::vector<ClientAttackMetrics>& rows);

}  // namespace shieldfl

#endif  // SHIELDFL_REPORT_H_
