#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

#include "newsbarrier/text_util.hpp"

namespace newsbarrier {

struct CountryAliases {
  std::string_view canonical;
  std::string_view aliases; // '|'-separated ISO alpha-2, alpha-3 and common names
};

// clang-format off
inline constexpr CountryAliases kCountryAliases[] = {
    {"Israel", "IL|ISR|State of Israel"},
    {"Australia", "AU|AUS"},
    {"Austria", "AT|AUT|Republic of Austria"},
    {"Belgium", "BE|BEL|Kingdom of Belgium"},
    {"Canada", "CA|CAN"},
    {"Denmark", "DK|DNK|Kingdom of Denmark"},
    {"Estonia", "EE|EST|Republic of Estonia"},
    {"Finland", "FI|FIN|Republic of Finland"},
    {"France", "FR|FRA|French Republic"},
    {"Germany", "DE|DEU|Federal Republic of Germany"},
    {"Hong Kong", "HK|HKG|Hong Kong Special Administrative Region of China"},
    {"Iceland", "IS|ISL|Republic of Iceland"},
    {"Ireland", "IE|IRL"},
    {"Italy", "IT|ITA|Italian Republic"},
    {"Luxembourg", "LU|LUX|Grand Duchy of Luxembourg"},
    {"Malta", "MT|MLT|Republic of Malta"},
    {"Netherlands", "NL|NLD|Kingdom of the Netherlands"},
    {"New Zealand", "NZ|NZL"},
    {"Norway", "NO|NOR|Kingdom of Norway"},
    {"Portugal", "PT|PRT|Portuguese Republic"},
    {"Singapore", "SG|SGP|Republic of Singapore"},
    {"Slovenia", "SI|SVN|Republic of Slovenia"},
    {"Spain", "ES|ESP|Kingdom of Spain"},
    {"Sweden", "SE|SWE|Kingdom of Sweden"},
    {"Switzerland", "CH|CHE|Swiss Confederation"},
    {"Taiwan", "TW|TWN|Taiwan, Province of China|Republic of China"},
    {"United Kingdom", "GB|GBR|United Kingdom of Great Britain and Northern Ireland|UK|U.K.|Britain|Great Britain"},
    {"United States", "US|USA|United States of America|U.S.|U.S.A.|America"},
    {"Czech Republic", "CZ|CZE|Czechia"},
    {"Japan", "JP|JPN"},
    {"South Korea", "KR|KOR|Korea, Republic of|Republic of Korea"},
    {"Armenia", "AM|ARM|Republic of Armenia"},
    {"Bulgaria", "BG|BGR|Republic of Bulgaria"},
    {"Chile", "CL|CHL|Republic of Chile"},
    {"Costa Rica", "CR|CRI|Republic of Costa Rica"},
    {"Croatia", "HR|HRV|Republic of Croatia"},
    {"Cyprus", "CY|CYP|Republic of Cyprus"},
    {"Georgia", "GE|GEO"},
    {"Greece", "GR|GRC|Hellenic Republic"},
    {"Hungary", "HU|HUN"},
    {"Latvia", "LV|LVA|Republic of Latvia"},
    {"Lithuania", "LT|LTU|Republic of Lithuania"},
    {"Mauritius", "MU|MUS|Republic of Mauritius"},
    {"Montenegro", "ME|MNE"},
    {"Panama", "PA|PAN|Republic of Panama"},
    {"Poland", "PL|POL|Republic of Poland"},
    {"Romania", "RO|ROU"},
    {"Serbia", "RS|SRB|Republic of Serbia"},
    {"Seychelles", "SC|SYC|Republic of Seychelles"},
    {"Slovakia", "SK|SVK|Slovak Republic"},
    {"Uruguay", "UY|URY|Eastern Republic of Uruguay"},
    {"Bangladesh", "BD|BGD|People's Republic of Bangladesh"},
    {"Djibouti", "DJ|DJI|Republic of Djibouti"},
    {"Egypt", "EG|EGY|Arab Republic of Egypt"},
    {"Iran", "IR|IRN|Iran, Islamic Republic of|Islamic Republic of Iran"},
    {"Iraq", "IQ|IRQ|Republic of Iraq"},
    {"Libya", "LY|LBY"},
    {"Nepal", "NP|NPL|Federal Democratic Republic of Nepal"},
    {"Nigeria", "NG|NGA|Federal Republic of Nigeria"},
    {"Pakistan", "PK|PAK|Islamic Republic of Pakistan"},
    {"Syria", "SY|SYR|Syrian Arab Republic"},
    {"Uganda", "UG|UGA|Republic of Uganda"},
    {"Benin", "BJ|BEN|Republic of Benin"},
    {"Burkina Faso", "BF|BFA"},
    {"Guinea", "GN|GIN|Republic of Guinea"},
    {"Guinea-Bissau", "GW|GNB|Republic of Guinea-Bissau"},
    {"Liberia", "LR|LBR|Republic of Liberia"},
    {"Madagascar", "MG|MDG|Republic of Madagascar"},
    {"Malawi", "MW|MWI|Republic of Malawi"},
    {"Mozambique", "MZ|MOZ|Republic of Mozambique"},
    {"Niger", "NE|NER|Republic of the Niger"},
    {"Papua New Guinea", "PG|PNG|Independent State of Papua New Guinea"},
    {"Sierra Leone", "SL|SLE|Republic of Sierra Leone"},
    {"Tanzania", "TZ|TZA|Tanzania, United Republic of|United Republic of Tanzania"},
    {"Zambia", "ZM|ZMB|Republic of Zambia"},
    {"Gabon", "GA|GAB|Gabonese Republic"},
    {"Venezuela", "VE|VEN|Venezuela, Bolivarian Republic of|Bolivarian Republic of Venezuela"},
    {"Afghanistan", "AF|AFG|Islamic Republic of Afghanistan"},
    {"Angola", "AO|AGO|Republic of Angola"},
    {"Burundi", "BI|BDI|Republic of Burundi"},
    {"Cameroon", "CM|CMR|Republic of Cameroon"},
    {"Central African Republic", "CF|CAF"},
    {"Chad", "TD|TCD|Republic of Chad"},
    {"Democratic Republic of the Congo", "CD|COD|Congo, The Democratic Republic of the|DRC|DR Congo|Congo-Kinshasa"},
    {"Eritrea", "ER|ERI|the State of Eritrea"},
    {"Ethiopia", "ET|ETH|Federal Democratic Republic of Ethiopia"},
    {"Haiti", "HT|HTI|Republic of Haiti"},
    {"Mali", "ML|MLI|Republic of Mali"},
    {"Mauritania", "MR|MRT|Islamic Republic of Mauritania"},
    {"Republic of the Congo", "CG|COG|Congo|Congo-Brazzaville"},
    {"Somalia", "SO|SOM|Federal Republic of Somalia"},
    {"Sudan", "SD|SDN|Republic of the Sudan"},
    {"Togo", "TG|TGO|Togolese Republic"},
    {"Yemen", "YE|YEM|Republic of Yemen"},
    {"Zimbabwe", "ZW|ZWE|Republic of Zimbabwe"},
    {"Azerbaijan", "AZ|AZE|Republic of Azerbaijan"},
    {"Bahrain", "BH|BHR|Kingdom of Bahrain"},
    {"China", "CN|CHN|People's Republic of China"},
    {"Kazakhstan", "KZ|KAZ|Republic of Kazakhstan"},
    {"Kuwait", "KW|KWT|State of Kuwait"},
    {"Malaysia", "MY|MYS"},
    {"Oman", "OM|OMN|Sultanate of Oman"},
    {"Qatar", "QA|QAT|State of Qatar"},
    {"Saudi Arabia", "SA|SAU|Kingdom of Saudi Arabia"},
    {"Thailand", "TH|THA|Kingdom of Thailand"},
    {"United Arab Emirates", "AE|ARE|UAE"},
    {"Vietnam", "VN|VNM|Viet Nam|Socialist Republic of Viet Nam"},
    {"Cambodia", "KH|KHM|Kingdom of Cambodia"},
    {"Equatorial Guinea", "GQ|GNQ|Republic of Equatorial Guinea"},
    {"Guatemala", "GT|GTM|Republic of Guatemala"},
    {"Honduras", "HN|HND|Republic of Honduras"},
    {"Laos", "LA|LAO|Lao People's Democratic Republic|Lao PDR"},
    {"Myanmar", "MM|MMR|Republic of Myanmar|Burma"},
    {"Nicaragua", "NI|NIC|Republic of Nicaragua"},
    {"Belarus", "BY|BLR|Republic of Belarus"},
    {"Russia", "RU|RUS|Russian Federation"},
    {"Turkey", "TR|TUR|Türkiye|Republic of Türkiye|Turkiye"},
    {"Algeria", "DZ|DZA|People's Democratic Republic of Algeria"},
    {"Jamaica", "JM|JAM"},
    {"Jordan", "JO|JOR|Hashemite Kingdom of Jordan"},
    {"Lebanon", "LB|LBN|Lebanese Republic"},
    {"Moldova", "MD|MDA|Moldova, Republic of|Republic of Moldova"},
    {"Morocco", "MA|MAR|Kingdom of Morocco"},
    {"Tunisia", "TN|TUN|Republic of Tunisia"},
    {"Ukraine", "UA|UKR"},
    {"Ghana", "GH|GHA|Republic of Ghana"},
    {"Namibia", "NA|NAM|Republic of Namibia"},
    {"Senegal", "SN|SEN|Republic of Senegal"},
    {"The Gambia", "GM|GMB|Gambia|Republic of the Gambia"},
    {"Botswana", "BW|BWA|Republic of Botswana"},
    {"El Salvador", "SV|SLV|Republic of El Salvador"},
    {"India", "IN|IND|Republic of India"},
    {"Kenya", "KE|KEN|Republic of Kenya"},
    {"Rwanda", "RW|RWA|Rwandese Republic"},
    {"South Africa", "ZA|ZAF|Republic of South Africa"},
    {"Colombia", "CO|COL|Republic of Colombia"},
    {"Dominican Republic", "DO|DOM"},
    {"Indonesia", "ID|IDN|Republic of Indonesia"},
    {"Mexico", "MX|MEX|United Mexican States"},
    {"Philippines", "PH|PHL|Republic of the Philippines"},
    {"Sri Lanka", "LK|LKA|Democratic Socialist Republic of Sri Lanka"},
    {"Albania", "AL|ALB|Republic of Albania"},
    {"Argentina", "AR|ARG|Argentine Republic"},
    {"Brazil", "BR|BRA|Federative Republic of Brazil"},
    {"Peru", "PE|PER|Republic of Peru"},
    {"Republic of Macedonia", "MK|MKD|North Macedonia|Republic of North Macedonia|Macedonia"},
    {"Bolivia", "BO|BOL|Bolivia, Plurinational State of|Plurinational State of Bolivia"},
    {"Bosnia and Herzegovina", "BA|BIH|Republic of Bosnia and Herzegovina"},
    {"Ecuador", "EC|ECU|Republic of Ecuador"},
    {"Guyana", "GY|GUY|Republic of Guyana"},
    {"Kyrgyzstan", "KG|KGZ|Kyrgyz Republic"},
    {"Mongolia", "MN|MNG"},
    {"Paraguay", "PY|PRY|Republic of Paraguay"},
    {"Suriname", "SR|SUR|Republic of Suriname"},
    {"Trinidad and Tobago", "TT|TTO|Republic of Trinidad and Tobago"},
};
// clang-format on

/// Case-insensitive alias resolution. Names outside the table pass through
/// trimmed, so unseen countries still join on exact (case-folded) spelling.
class CountryNames {
public:
  static const CountryNames &instance() {
    static const CountryNames names;
    return names;
  }

  /// Display form, e.g. "usa" -> "United States".
  std::string canonical(std::string_view name) const {
    const std::string_view t = trim(name);
    auto it = by_key_.find(to_lower(t));
    return it == by_key_.end() ? std::string(t) : std::string(it->second);
  }

  /// Matching key: folded canonical form.
  std::string key(std::string_view name) const { return to_lower(canonical(name)); }

private:
  CountryNames() {
    for (const auto &entry : kCountryAliases) {
      by_key_.emplace(to_lower(entry.canonical), entry.canonical);
      std::string_view rest = entry.aliases;
      while (!rest.empty()) {
        const auto bar = rest.find('|');
        by_key_.emplace(to_lower(rest.substr(0, bar)), entry.canonical);
        rest = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
      }
    }
  }

  std::unordered_map<std::string, std::string_view> by_key_;
};

} // namespace newsbarrier
